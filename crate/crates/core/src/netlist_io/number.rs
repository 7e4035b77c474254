//! Engineering-notation numbers: `4.7k`, `220n`, `1.5e-3`, `10M`.

use crate::Real;

const SUFFIXES: [(i32, char); 7] = [(-12, 'p'), (-9, 'n'), (-6, 'u'), (-3, 'm'), (0, ' '), (3, 'k'), (6, 'M')];

fn suffix_exponent(c: char) -> Option<i32> {
    match c {
        'p' | 'P' => Some(-12),
        'n' | 'N' => Some(-9),
        'u' | 'U' => Some(-6),
        'm' => Some(-3),
        'k' | 'K' => Some(3),
        'M' => Some(6),
        _ => None,
    }
}

/// Why a token is not a number; `offset` is the char index of the culprit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct NumberError {
    pub offset: usize,
}

/// Parses a number with an optional exponent and one optional suffix.
///
/// The digits are handed to the standard library parser unchanged, so the
/// result is correctly rounded.
pub(crate) fn parse_number<T: Real>(token: &str) -> Result<T, NumberError> {
    let chars: Vec<char> = token.chars().collect();
    let mut i = 0;
    let mut mantissa = String::new();
    if let Some(&c @ ('+' | '-')) = chars.first() {
        mantissa.push(c);
        i += 1;
    }
    let digits_start = i;
    let mut seen_dot = false;
    let mut seen_digit = false;
    while let Some(&c) = chars.get(i) {
        if c.is_ascii_digit() {
            seen_digit = true;
        } else if c == '.' && !seen_dot {
            seen_dot = true;
        } else {
            break;
        }
        mantissa.push(c);
        i += 1;
    }
    if !seen_digit {
        return Err(NumberError { offset: digits_start.min(chars.len().saturating_sub(1)) });
    }

    let mut exponent: i64 = 0;
    if matches!(chars.get(i), Some('e' | 'E')) {
        let start = i;
        let mut j = i + 1;
        let mut negative = false;
        if let Some(&c @ ('+' | '-')) = chars.get(j) {
            negative = c == '-';
            j += 1;
        }
        let exp_digits = j;
        while chars.get(j).is_some_and(char::is_ascii_digit) {
            exponent = (exponent * 10 + i64::from(chars[j].to_digit(10).unwrap_or(0))).min(100_000);
            j += 1;
        }
        if j == exp_digits {
            return Err(NumberError { offset: start });
        }
        if negative {
            exponent = -exponent;
        }
        i = j;
    }

    if let Some(&c) = chars.get(i) {
        match suffix_exponent(c) {
            Some(e) if i + 1 == chars.len() => exponent += i64::from(e),
            Some(_) => return Err(NumberError { offset: i + 1 }),
            None => return Err(NumberError { offset: i }),
        }
    }

    let value: T = format!("{mantissa}e{exponent}").parse().map_err(|_| NumberError { offset: 0 })?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(NumberError { offset: 0 })
    }
}

/// Shortest decimal that parses back to exactly `value`, written with an
/// engineering suffix when one fits (`4.7k`, `100u`), else in plain
/// exponent form (`1e-14`).
pub(crate) fn format_number<T: Real>(value: T) -> String {
    if value == T::zero() {
        return "0".to_string();
    }
    let sci = format!("{value:e}");
    let (sign, sci) = match sci.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", sci.as_str()),
    };
    let (mantissa, exp) = sci.split_once('e').expect("LowerExp always writes an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();

    let engineering = exp.div_euclid(3) * 3;
    let Some(&(_, suffix)) = SUFFIXES.iter().find(|(e, _)| *e == engineering) else {
        return format!("{sign}{sci}");
    };
    let integer_len = usize::try_from(exp - engineering).expect("non-negative shift") + 1;
    let mut body = if digits.len() > integer_len {
        format!("{}.{}", &digits[..integer_len], &digits[integer_len..])
    } else {
        format!("{digits:0<integer_len$}")
    };
    if suffix != ' ' {
        body.push(suffix);
    }
    format!("{sign}{body}")
}
