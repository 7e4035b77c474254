//! Line-oriented text netlists.
//!
//! ```text
//! # 9 V battery driving a divider
//! V1 n1 0 9 rint=0.5
//! R1 n1 n2 1k
//! R2 n2 0 1k
//! ```

use std::collections::BTreeSet;

use super::number::{format_number, parse_number};
use super::ParseError;
use crate::circuit::{
    build_netlist, validate_params, Branch, Component, ComponentId, ComponentKind, ComponentParams, Netlist, NodeId,
};
use crate::Real;

/// A whitespace-separated token and its 1-based char column.
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut column = 0;
    for (byte, c) in line.char_indices() {
        column += 1;
        match (c.is_whitespace(), start) {
            (false, None) => start = Some((byte, column)),
            (true, Some((b, col))) => {
                out.push(Token { text: &line[b..byte], column: col });
                start = None;
            }
            _ => {}
        }
    }
    if let Some((b, col)) = start {
        out.push(Token { text: &line[b..], column: col });
    }
    out
}

fn valid_node_name(name: &str) -> bool {
    name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '+' | '-' | '.'))
}

fn parse_line<T: Real>(line_no: usize, line: &str) -> Result<Option<Branch<T>>, ParseError> {
    let toks = tokens(line);
    let Some(first) = toks.first() else {
        return Ok(None);
    };
    if first.text.starts_with('#') {
        return Ok(None);
    }
    let syntax = |column: usize, message: String| ParseError::SyntaxError { line: line_no, column, message };

    let kind = ComponentKind::from_id(first.text).ok_or_else(|| ParseError::UnknownKind {
        line: line_no,
        column: first.column,
        token: first.text.to_string(),
    })?;
    let id = ComponentId::new(first.text);
    let mut params = ComponentParams::<T>::defaults(kind);
    Component::new(id.clone(), params).map_err(|e| syntax(first.column, e.to_string()))?;

    let arity = kind.terminals().len();
    let mut nodes = Vec::with_capacity(arity);
    for i in 0..arity {
        let Some(tok) = toks.get(1 + i) else {
            let column = line.chars().count() + 1;
            return Err(syntax(column, format!("{kind} {id} needs {arity} nodes, found {i}")));
        };
        if tok.text.contains('=') || !valid_node_name(tok.text) {
            return Err(syntax(tok.column, format!("'{}' is not a node name", tok.text)));
        }
        nodes.push(NodeId::new(tok.text));
    }

    let specs = kind.param_specs();
    let mut assigned = vec![false; specs.len()];
    let mut next_positional = 0;
    for tok in &toks[1 + arity..] {
        let (index, value_text, value_column) = match tok.text.split_once('=') {
            Some((key, value)) => {
                let index = specs
                    .iter()
                    .position(|s| s.key.eq_ignore_ascii_case(key))
                    .ok_or_else(|| syntax(tok.column, format!("{kind} has no parameter '{key}'")))?;
                (index, value, tok.column + key.chars().count() + 1)
            }
            None => {
                while assigned.get(next_positional) == Some(&true) {
                    next_positional += 1;
                }
                if next_positional >= specs.len() {
                    return Err(syntax(tok.column, format!("too many values for {kind} {id}")));
                }
                (next_positional, tok.text, tok.column)
            }
        };
        if assigned[index] {
            return Err(syntax(tok.column, format!("parameter '{}' given twice", specs[index].key)));
        }
        let value = parse_number::<T>(value_text).map_err(|e| ParseError::BadNumber {
            line: line_no,
            column: value_column + e.offset,
            token: value_text.to_string(),
        })?;
        params.set(specs[index].key, value).expect("key from the kind's own table");
        assigned[index] = true;
    }

    if let Err(violations) = validate_params(kind, &params) {
        let message = violations.iter().map(|v| v.message.as_str()).collect::<Vec<_>>().join(", ");
        return Err(ParseError::InvalidParam { line: line_no, column: first.column, message });
    }
    let component = Component::new(id, params).map_err(|e| syntax(first.column, e.to_string()))?;
    Ok(Some(Branch::new(component, nodes)))
}

/// Parses a text netlist. Node `0` is ground whenever it appears.
pub fn parse_netlist<T: Real>(text: &str) -> Result<Netlist<T>, ParseError> {
    let mut branches = Vec::new();
    let mut ids = BTreeSet::new();
    for (index, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if let Some(branch) = parse_line::<T>(index + 1, line)? {
            if !ids.insert(branch.id().clone()) {
                let column = tokens(line)[0].column;
                return Err(ParseError::DuplicateId { line: index + 1, column, id: branch.id().clone() });
            }
            branches.push(branch);
        }
    }
    Ok(build_netlist(branches).expect("records were checked line by line"))
}

/// Parses raw bytes; invalid UTF-8 is reported as a syntax error at the
/// offending byte.
pub fn parse_netlist_bytes<T: Real>(bytes: &[u8]) -> Result<Netlist<T>, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_netlist(text),
        Err(e) => {
            let valid = &bytes[..e.valid_up_to()];
            let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
            let line_start = valid.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
            let prefix = std::str::from_utf8(&valid[line_start..]).unwrap_or_default();
            Err(ParseError::SyntaxError {
                line,
                column: prefix.chars().count() + 1,
                message: "input is not valid UTF-8".into(),
            })
        }
    }
}

fn positional_primary(kind: ComponentKind) -> bool {
    matches!(
        kind,
        ComponentKind::Resistor | ComponentKind::Capacitor | ComponentKind::BatteryDc | ComponentKind::SourceAc
    )
}

/// Canonical text for one component record.
pub fn format_record<T: Real>(component: &Component<T>, nodes: &[NodeId]) -> String {
    let mut fields: Vec<String> = vec![component.id().to_string()];
    fields.extend(nodes.iter().map(ToString::to_string));
    for (i, (key, value)) in component.params().named_values().into_iter().enumerate() {
        if i == 0 && positional_primary(component.kind()) {
            fields.push(format_number(value));
        } else {
            fields.push(format!("{key}={}", format_number(value)));
        }
    }
    fields.join(" ")
}

/// Canonical text: one record per line, sorted by id, every parameter
/// written in its fixed order.
pub fn format_netlist<T: Real>(netlist: &Netlist<T>) -> String {
    netlist.branches().iter().map(|b| format_record(&b.component, &b.nodes) + "\n").collect()
}
