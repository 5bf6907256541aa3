//! Shared helpers for the `kind:key=value,...` descriptor grammars.

use crate::error::{Error, Result};

/// Splits `kind:body` into its parts. The body is empty when no colon is present.
pub(crate) fn split_kind(input: &str) -> (&str, &str) {
    match input.split_once(':') {
        Some((kind, body)) => (kind, body),
        None => (input, ""),
    }
}

pub(crate) fn parse_f64(input: &str, token: &str) -> Result<f64> {
    let v: f64 = token
        .trim()
        .parse()
        .map_err(|_| Error::parse(input, format!("`{token}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(input, format!("`{token}` is not finite")));
    }
    Ok(v)
}

/// Parses `k1=v1,k2=v2` against the listed keys. Every required key must be
/// present; optional keys return `None` when absent.
pub(crate) fn parse_params(
    input: &str,
    body: &str,
    required: &[&str],
    optional: &[&str],
) -> Result<Vec<Option<f64>>> {
    let mut values: Vec<Option<f64>> = vec![None; required.len() + optional.len()];
    if !body.is_empty() {
        for item in body.split(',') {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::parse(input, format!("expected key=value, found `{item}`")))?;
            let slot = required
                .iter()
                .chain(optional)
                .position(|k| *k == key)
                .ok_or_else(|| Error::parse(input, format!("unknown key `{key}`")))?;
            if values[slot].is_some() {
                return Err(Error::parse(input, format!("duplicate key `{key}`")));
            }
            values[slot] = Some(parse_f64(input, value)?);
        }
    }
    for (k, v) in required.iter().zip(&values) {
        if v.is_none() {
            return Err(Error::parse(input, format!("missing key `{k}`")));
        }
    }
    Ok(values)
}
