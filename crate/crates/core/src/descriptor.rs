//! The flat `kind(arg,...)` mini-language shared by exponent, grid and
//! profile descriptors. No nesting, no expressions.

use crate::error::{Error, Result};

/// Splits `name(a,b,c)` into the name and its trimmed arguments. A bare
/// identifier such as `zero` yields an empty argument list.
pub(crate) fn split_call(input: &str) -> Result<(&str, Vec<&str>)> {
    let s = input.trim();
    let Some(open) = s.find('(') else {
        if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Ok((s, Vec::new()));
        }
        return Err(Error::parse(input, "expected `kind(args...)`"));
    };
    let Some(body) = s[open + 1..].strip_suffix(')') else {
        return Err(Error::parse(input, "missing closing parenthesis"));
    };
    if body.contains('(') || body.contains(')') {
        return Err(Error::parse(input, "nested descriptors are not supported"));
    }
    let name = s[..open].trim();
    if name.is_empty() {
        return Err(Error::parse(input, "missing descriptor kind"));
    }
    let args = if body.trim().is_empty() {
        Vec::new()
    } else {
        body.split(',').map(str::trim).collect()
    };
    Ok((name, args))
}

pub(crate) fn expect_arity(input: &str, args: &[&str], arity: usize) -> Result<()> {
    if args.len() != arity {
        return Err(Error::parse(
            input,
            format!("expected {arity} argument(s), found {}", args.len()),
        ));
    }
    Ok(())
}

pub(crate) fn real(input: &str, arg: &str) -> Result<f64> {
    let v: f64 = arg
        .parse()
        .map_err(|_| Error::parse(input, format!("`{arg}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(input, format!("`{arg}` is not finite")));
    }
    Ok(v)
}

pub(crate) fn integer<T: std::str::FromStr>(input: &str, arg: &str) -> Result<T> {
    arg.parse()
        .map_err(|_| Error::parse(input, format!("`{arg}` is not an integer")))
}

/// Implements `Serialize`/`Deserialize` through `Display`/`FromStr` so
/// descriptors appear in config files and reports as their text form.
macro_rules! serde_via_str {
    ($ty:ty) => {
        impl serde::Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> serde::Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

pub(crate) use serde_via_str;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_calls() {
        assert_eq!(split_call("loginterp(3.0, 2)").unwrap(), ("loginterp", vec!["3.0", "2"]));
        assert_eq!(split_call("zero").unwrap(), ("zero", vec![]));
        assert_eq!(split_call(" grid(-30,30,8) ").unwrap(), ("grid", vec!["-30", "30", "8"]));
    }

    #[test]
    fn rejects_malformed() {
        assert!(split_call("const(2").is_err());
        assert!(split_call("a(b(1))").is_err());
        assert!(split_call("(1,2)").is_err());
        assert!(split_call("").is_err());
        assert!(real("x", "nan").is_err());
    }
}
