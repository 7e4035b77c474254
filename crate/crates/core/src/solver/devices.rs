//! Large-signal device laws and their derivatives.

use crate::circuit::THERMAL_VOLTAGE;
use crate::Real;

/// Exponent beyond which `exp` is continued linearly so that a wild Newton
/// iterate cannot overflow.
const EXP_KNEE: f64 = 80.0;

/// `(exp(x), d/dx exp(x))` with linear continuation above the knee.
pub(crate) fn limited_exp<T: Real>(x: T) -> (T, T) {
    let knee = T::lit(EXP_KNEE);
    if x > knee {
        let e = knee.exp();
        (e * (T::one() + x - knee), e)
    } else {
        let e = x.exp();
        (e, e)
    }
}

/// Shockley junction: current and small-signal conductance at `v`.
pub(crate) fn junction<T: Real>(v: T, saturation_current: T, emission_coefficient: T) -> (T, T) {
    let nvt = emission_coefficient * T::lit(THERMAL_VOLTAGE);
    let (e, de) = limited_exp(v / nvt);
    (saturation_current * (e - T::one()), saturation_current * de / nvt)
}

/// Ebers-Moll transport model of an NPN transistor.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NpnEval<T> {
    pub ic: T,
    pub ib: T,
    /// d(ic, ib) / d(vbe, vbc)
    pub dic_dvbe: T,
    pub dic_dvbc: T,
    pub dib_dvbe: T,
    pub dib_dvbc: T,
}

pub(crate) fn npn<T: Real>(vbe: T, vbc: T, saturation_current: T, forward_beta: T, reverse_beta: T) -> NpnEval<T> {
    let (i_f, g_f) = junction(vbe, saturation_current, T::one());
    let (i_r, g_r) = junction(vbc, saturation_current, T::one());
    NpnEval {
        ic: i_f - i_r - i_r / reverse_beta,
        ib: i_f / forward_beta + i_r / reverse_beta,
        dic_dvbe: g_f,
        dic_dvbc: -g_r - g_r / reverse_beta,
        dib_dvbe: g_f / forward_beta,
        dib_dvbc: g_r / reverse_beta,
    }
}
