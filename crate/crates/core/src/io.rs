//! JSON input formats for lattices and Hodge actions.
//!
//! A lattice is `{"name": "...", "gram": [[...], ...]}` with entries given
//! as JSON integers or decimal strings. A Hodge action is
//! `{"order": N, "matrix": [[...]]}` for a matrix on `T`, or
//! `{"order": N, "discriminant": [[...]]}` for the images of the
//! generators of `A_T`. The `order` key is optional.

use num_bigint::BigInt;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hodge::HodgeAction;
use crate::lattice::IntegerLattice;
use crate::matrix::IntMatrix;

fn entry(v: &Value) -> Result<BigInt> {
    let bad = || Error::invalid("gram entries must be integers");
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(bad())
            }
        }
        Value::String(s) => s.trim().parse::<BigInt>().map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn int_rows(v: &Value, what: &str) -> Result<Vec<Vec<BigInt>>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::invalid(format!("{what} must be an array of rows")))?;
    rows.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::invalid(format!("{what} must be an array of rows")))?
                .iter()
                .map(entry)
                .collect()
        })
        .collect()
}

/// Square, symmetric, nondegenerate integer matrix from a `gram` value.
fn gram_matrix(v: &Value) -> Result<IntMatrix> {
    let rows = int_rows(v, "gram")?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::invalid("gram must be square"));
    }
    Ok(IntMatrix::from_rows(rows).expect("square rows"))
}

fn lattice_from_value(v: &Value) -> Result<IntegerLattice> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::invalid("lattice must be a JSON object"))?;
    let gram = obj
        .get("gram")
        .ok_or_else(|| Error::invalid("lattice object needs a \"gram\" key"))?;
    let lattice = IntegerLattice::new(gram_matrix(gram)?)?;
    match obj.get("name") {
        None | Some(Value::Null) => Ok(lattice),
        Some(Value::String(s)) => Ok(lattice.with_name(s.clone())),
        Some(_) => Err(Error::invalid("lattice name must be a string")),
    }
}

fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::invalid(format!("invalid JSON: {e}")))
}

pub fn parse_lattice(text: &str) -> Result<IntegerLattice> {
    lattice_from_value(&parse(text)?)
}

/// One lattice object or an array of them.
pub fn parse_lattice_list(text: &str) -> Result<Vec<IntegerLattice>> {
    match parse(text)? {
        Value::Array(items) => {
            if items.is_empty() {
                return Err(Error::invalid("lattice list is empty"));
            }
            items.iter().map(lattice_from_value).collect()
        }
        v => Ok(vec![lattice_from_value(&v)?]),
    }
}

/// A Hodge action with its optional declared order.
pub fn parse_hodge_action(text: &str) -> Result<(Option<u64>, HodgeAction)> {
    let v = parse(text)?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::invalid("Hodge action must be a JSON object"))?;
    let order = match obj.get("order") {
        None => None,
        Some(o) => Some(
            o.as_u64()
                .ok_or_else(|| Error::invalid("Hodge order must be a positive integer"))?,
        ),
    };
    let action = match (obj.get("matrix"), obj.get("discriminant")) {
        (Some(m), None) => {
            let rows = int_rows(m, "matrix")?;
            let n = rows.len();
            if n == 0 || rows.iter().any(|r| r.len() != n) {
                return Err(Error::invalid("matrix must be square"));
            }
            HodgeAction::Lattice(IntMatrix::from_rows(rows).expect("square rows"))
        }
        (None, Some(d)) => {
            let images = d
                .as_array()
                .ok_or_else(|| Error::invalid("discriminant must be an array of images"))?
                .iter()
                .map(|r| {
                    r.as_array()
                        .ok_or_else(|| Error::invalid("discriminant must be an array of images"))?
                        .iter()
                        .map(|x| {
                            x.as_u64()
                                .ok_or_else(|| Error::invalid("discriminant images must be nonnegative integers"))
                        })
                        .collect()
                })
                .collect::<Result<Vec<Vec<u64>>>>()?;
            HodgeAction::Discriminant(images)
        }
        _ => {
            return Err(Error::invalid(
                "Hodge action needs exactly one of \"matrix\" or \"discriminant\"",
            ))
        }
    };
    Ok((order, action))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattices() {
        let l = parse_lattice(r#"{"gram": [[2,1],[1,-2]]}"#).unwrap();
        assert_eq!(l.det(), BigInt::from(-5));
        let u = parse_lattice(r#"{"name": "U", "gram": [[0,"1"],["1",0]]}"#).unwrap();
        assert_eq!(u.name(), Some("U"));
        let big = parse_lattice(r#"{"gram": [["123456789012345678901234567890"]]}"#).unwrap();
        assert_eq!(big.det(), "123456789012345678901234567890".parse::<BigInt>().unwrap());
    }

    #[test]
    fn lattice_errors() {
        let msg = |s: &str| parse_lattice(s).unwrap_err().to_string();
        assert_eq!(msg(r#"{"gram": [[2,1],[1,2],[0,0]]}"#), "gram must be square");
        assert_eq!(msg(r#"{"gram": [[2,1],[0,2]]}"#), "gram must be symmetric");
        assert_eq!(msg(r#"{"gram": [[2,1.5],[1.5,2]]}"#), "gram entries must be integers");
        assert_eq!(msg(r#"{"gram": [[2,2],[2,2]]}"#), "degenerate lattice");
        assert!(msg("{").starts_with("invalid JSON"));
    }

    #[test]
    fn lists_and_actions() {
        assert_eq!(
            parse_lattice_list(r#"[{"gram": [[2]]}, {"gram": [[4]]}]"#)
                .unwrap()
                .len(),
            2
        );
        assert_eq!(parse_lattice_list(r#"{"gram": [[2]]}"#).unwrap().len(), 1);
        let (o, a) = parse_hodge_action(r#"{"order": 4, "matrix": [[0,-1],[1,0]]}"#).unwrap();
        assert_eq!(o, Some(4));
        assert!(matches!(a, HodgeAction::Lattice(_)));
        let (o, a) = parse_hodge_action(r#"{"discriminant": [[3]]}"#).unwrap();
        assert_eq!((o, a), (None, HodgeAction::Discriminant(vec![vec![3]])));
        assert!(parse_hodge_action(r#"{"order": 4}"#).is_err());
    }
}
