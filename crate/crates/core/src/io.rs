//! File formats: families as CSV/JSON, lattice functions and average specs
//! as JSON.
//!
//! Index coordinates travel as exact tokens (integers, `n/d` fractions, or
//! decimal strings), never as floats, so strict-increase and box tests
//! survive the round trip. JSON family coordinates therefore accept
//! integers and strings only.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::family::{ParamFamily, SeminormValue};
use crate::lattice::{AverageSpec, IntPolynomial, LatticeFunction, Space};
use crate::rat::{parse_rat, rat_to_string, GridPoint};

// ---------------------------------------------------------------------------
// ParamFamily: CSV with header `t_1,…,t_k,value`
// ---------------------------------------------------------------------------

pub fn family_from_csv_str(text: &str) -> Result<ParamFamily> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Malformed("empty CSV".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 2 || cols.last() != Some(&"value") {
        return Err(Error::Malformed(
            "CSV header must be t_1,…,t_k,value".into(),
        ));
    }
    let k = cols.len() - 1;
    let mut entries = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != k + 1 {
            return Err(Error::Malformed(format!(
                "CSV row {} has {} fields, expected {}",
                lineno + 2,
                fields.len(),
                k + 1
            )));
        }
        let point: GridPoint = fields[..k]
            .iter()
            .map(|s| parse_rat(s))
            .collect::<Result<_>>()?;
        let value: f64 = fields[k]
            .parse()
            .map_err(|_| Error::Malformed(format!("bad value on CSV row {}", lineno + 2)))?;
        entries.push((point, Complex64::new(value, 0.0)));
    }
    ParamFamily::new(k, entries)
}

pub fn family_to_csv_str(fam: &ParamFamily) -> String {
    let k = fam.dim_k();
    let mut out = String::new();
    for i in 1..=k {
        out.push_str(&format!("t_{i},"));
    }
    out.push_str("value\n");
    for (point, value) in fam.points().iter().zip(fam.values()) {
        for c in point {
            out.push_str(&rat_to_string(c));
            out.push(',');
        }
        out.push_str(&format!("{}\n", value.re));
    }
    out
}

// ---------------------------------------------------------------------------
// ParamFamily: JSON array of {t: [..], value: ..}
// ---------------------------------------------------------------------------

pub fn family_from_json_str(text: &str) -> Result<ParamFamily> {
    let rows: Vec<Value> = serde_json::from_str(text)?;
    if rows.is_empty() {
        return Err(Error::IndexSetTooSmall);
    }
    let mut entries = Vec::new();
    let mut k = 0usize;
    for row in rows {
        let t = row
            .get("t")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Malformed("family row needs a 't' array".into()))?;
        let point: GridPoint = t
            .iter()
            .map(|c| match c {
                Value::Number(n) if n.is_i64() => Ok(crate::rat::rat_int(n.as_i64().unwrap())),
                Value::String(s) => parse_rat(s),
                other => Err(Error::Malformed(format!(
                    "coordinate {other} must be an integer or an exact string token"
                ))),
            })
            .collect::<Result<_>>()?;
        k = point.len();
        let value = row
            .get("value")
            .ok_or_else(|| Error::Malformed("family row needs a 'value'".into()))?;
        let v = match value {
            Value::Number(n) => Complex64::new(
                n.as_f64()
                    .ok_or_else(|| Error::Malformed("bad value number".into()))?,
                0.0,
            ),
            Value::Array(pair) if pair.len() == 2 => {
                let re = pair[0]
                    .as_f64()
                    .ok_or_else(|| Error::Malformed("bad re".into()))?;
                let im = pair[1]
                    .as_f64()
                    .ok_or_else(|| Error::Malformed("bad im".into()))?;
                Complex64::new(re, im)
            }
            other => {
                return Err(Error::Malformed(format!(
                    "value {other} must be a number or [re, im]"
                )))
            }
        };
        entries.push((point, v));
    }
    ParamFamily::new(k, entries)
}

pub fn family_to_json_string(fam: &ParamFamily) -> Result<String> {
    let rows: Vec<Value> = fam
        .points()
        .iter()
        .zip(fam.values())
        .map(|(point, value)| {
            let t: Vec<Value> = point
                .iter()
                .map(|c| {
                    if c.denom() == &1 {
                        Value::from(*c.numer())
                    } else {
                        Value::from(rat_to_string(c))
                    }
                })
                .collect();
            let v = if value.im == 0.0 {
                Value::from(value.re)
            } else {
                Value::from(vec![value.re, value.im])
            };
            serde_json::json!({"t": t, "value": v})
        })
        .collect();
    Ok(serde_json::to_string(&rows)?)
}

// ---------------------------------------------------------------------------
// SeminormValue
// ---------------------------------------------------------------------------

pub fn seminorm_to_json_string(v: &SeminormValue) -> Result<String> {
    Ok(serde_json::to_string(v)?)
}

pub fn seminorm_from_json_str(text: &str) -> Result<SeminormValue> {
    Ok(serde_json::from_str(text)?)
}

// ---------------------------------------------------------------------------
// LatticeFunction: {space: {kind, dim, N?}, points: [[c_1,…,c_d, re, im]]}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SpaceJson {
    kind: String,
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none", rename = "N", default)]
    n: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct LatticeFunctionJson {
    space: SpaceJson,
    points: Vec<Vec<f64>>,
}

pub fn lattice_function_from_json_str(text: &str) -> Result<LatticeFunction> {
    let raw: LatticeFunctionJson = serde_json::from_str(text)?;
    let dim = raw.space.dim;
    let mut points = Vec::with_capacity(raw.points.len());
    for row in &raw.points {
        if row.len() != dim + 2 {
            return Err(Error::Malformed(format!(
                "point row has {} entries, expected {}",
                row.len(),
                dim + 2
            )));
        }
        let coords: Vec<i64> = row[..dim]
            .iter()
            .map(|&c| {
                if c.fract() == 0.0 && c.abs() < 2f64.powi(53) {
                    Ok(c as i64)
                } else {
                    Err(Error::Malformed(format!("non-integer coordinate {c}")))
                }
            })
            .collect::<Result<_>>()?;
        points.push((coords, Complex64::new(row[dim], row[dim + 1])));
    }
    match raw.space.kind.as_str() {
        "lattice" => LatticeFunction::lattice_from_points(dim, &points),
        "cyclic" => {
            let n = raw
                .space
                .n
                .ok_or_else(|| Error::Malformed("cyclic space needs N".into()))?;
            let mut f = LatticeFunction::zero_cyclic(dim, n);
            for (coords, v) in points {
                let wrapped: Vec<i64> = coords.iter().map(|c| c.rem_euclid(n as i64)).collect();
                let current = f.get(&wrapped);
                set_cyclic(&mut f, &wrapped, current + v);
            }
            Ok(f)
        }
        other => Err(Error::Malformed(format!("unknown space kind '{other}'"))),
    }
}

fn set_cyclic(f: &mut LatticeFunction, x: &[i64], v: Complex64) {
    let n = f.space().modulus().expect("cyclic");
    let mut idx = 0usize;
    for &c in x {
        idx = idx * n + c.rem_euclid(n as i64) as usize;
    }
    f.values_mut()[idx] = v;
}

pub fn lattice_function_to_json_string(f: &LatticeFunction) -> Result<String> {
    let (kind, n) = match f.space() {
        Space::Lattice { .. } => ("lattice", None),
        Space::Cyclic { modulus, .. } => ("cyclic", Some(modulus)),
    };
    let points: Vec<Vec<f64>> = f
        .iter_points()
        .filter(|(_, v)| v.norm() != 0.0)
        .map(|(coords, v)| {
            let mut row: Vec<f64> = coords.iter().map(|&c| c as f64).collect();
            row.push(v.re);
            row.push(v.im);
            row
        })
        .collect();
    let raw = LatticeFunctionJson {
        space: SpaceJson {
            kind: kind.to_string(),
            dim: f.dim(),
            n,
        },
        points,
    };
    Ok(serde_json::to_string(&raw)?)
}

// ---------------------------------------------------------------------------
// AverageSpec: polynomials with terms as [[e_1,…,e_k], coeff]
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct PolynomialJson {
    vars: usize,
    terms: Vec<(Vec<u32>, i64)>,
}

#[derive(Serialize, Deserialize)]
struct AverageSpecJson {
    polynomials: Vec<PolynomialJson>,
    #[serde(rename = "box")]
    box_m: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    shifts: Option<Vec<Vec<i64>>>,
}

/// Parses an average spec; when `shifts` is omitted the coordinate shifts
/// `S_j x = x − e_j` are filled in (requiring `d` polynomials for a
/// `d`-dimensional space, passed as `dim`).
pub fn average_spec_from_json_str(text: &str, dim: usize) -> Result<AverageSpec> {
    let raw: AverageSpecJson = serde_json::from_str(text)?;
    let polynomials: Vec<IntPolynomial> = raw
        .polynomials
        .into_iter()
        .map(|p| IntPolynomial::new(p.vars, p.terms))
        .collect::<Result<_>>()?;
    match raw.shifts {
        Some(shifts) => Ok(AverageSpec {
            polynomials,
            box_m: raw.box_m,
            shifts,
        }),
        None => AverageSpec::with_coordinate_shifts(polynomials, raw.box_m, dim),
    }
}

pub fn average_spec_to_json_string(spec: &AverageSpec) -> Result<String> {
    let raw = AverageSpecJson {
        polynomials: spec
            .polynomials
            .iter()
            .map(|p| PolynomialJson {
                vars: p.num_vars(),
                terms: p.terms().map(|(e, c)| (e.clone(), c)).collect(),
            })
            .collect(),
        box_m: spec.box_m.clone(),
        shifts: Some(spec.shifts.clone()),
    };
    Ok(serde_json::to_string(&raw)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;
    use num_rational::Rational64;

    #[test]
    fn csv_round_trip_with_exact_coordinates() {
        let text = "t_1,value\n0,1.5\n0.5,-2\n3/2,0.25\n";
        let fam = family_from_csv_str(text).unwrap();
        assert_eq!(fam.len(), 3);
        assert_eq!(fam.point(1)[0], Rational64::new(1, 2));
        assert_eq!(fam.point(2)[0], Rational64::new(3, 2));
        let back = family_to_csv_str(&fam);
        let fam2 = family_from_csv_str(&back).unwrap();
        assert_eq!(fam, fam2);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(family_from_csv_str("").is_err());
        assert!(family_from_csv_str("a,b\n1,2\n").is_err());
        assert!(family_from_csv_str("t_1,value\n1\n").is_err());
        assert!(family_from_csv_str("t_1,value\nx,2\n").is_err());
    }

    #[test]
    fn json_family_round_trip() {
        let text = r#"[{"t":[0,"1/2"],"value":1.0},{"t":[1,"1/2"],"value":[0.5,-0.5]}]"#;
        let fam = family_from_json_str(text).unwrap();
        assert_eq!(fam.dim_k(), 2);
        assert_eq!(fam.point(0)[1], Rational64::new(1, 2));
        assert_eq!(fam.value(1).im, -0.5);
        let back = family_to_json_string(&fam).unwrap();
        let fam2 = family_from_json_str(&back).unwrap();
        assert_eq!(fam, fam2);
    }

    #[test]
    fn json_family_rejects_float_coordinates() {
        let text = r#"[{"t":[0.5],"value":1.0},{"t":[1],"value":2.0}]"#;
        assert!(family_from_json_str(text).is_err());
    }

    #[test]
    fn lattice_function_round_trip() {
        let f = LatticeFunction::lattice_from_points(
            2,
            &[
                (vec![0, 1], Complex64::new(1.0, 0.0)),
                (vec![-2, 3], Complex64::new(0.0, -2.5)),
            ],
        )
        .unwrap();
        let js = lattice_function_to_json_string(&f).unwrap();
        let back = lattice_function_from_json_str(&js).unwrap();
        assert!(f.max_abs_diff(&back).unwrap() < 1e-15);

        let text = r#"{"space":{"kind":"cyclic","dim":1,"N":8},"points":[[0,1,0],[3,-0.5,0.25]]}"#;
        let g = lattice_function_from_json_str(text).unwrap();
        assert_eq!(g.get(&[3]), Complex64::new(-0.5, 0.25));
        assert_eq!(g.get(&[11]), Complex64::new(-0.5, 0.25));
        let js2 = lattice_function_to_json_string(&g).unwrap();
        let back2 = lattice_function_from_json_str(&js2).unwrap();
        assert!(g.max_abs_diff(&back2).unwrap() < 1e-15);
    }

    #[test]
    fn average_spec_round_trip() {
        let text = r#"{"polynomials":[{"vars":1,"terms":[[[2],1]]}],"box":[4]}"#;
        let spec = average_spec_from_json_str(text, 1).unwrap();
        assert_eq!(spec.box_m, vec![4]);
        assert_eq!(spec.shifts, vec![vec![-1]]);
        let js = average_spec_to_json_string(&spec).unwrap();
        let spec2 = average_spec_from_json_str(&js, 1).unwrap();
        assert_eq!(spec2.shifts, spec.shifts);
        assert_eq!(spec2.box_m, spec.box_m);
    }

    #[test]
    fn seminorm_json_round_trip() {
        let fam = ParamFamily::from_reals(&[0.0, 1.0, 0.0]).unwrap();
        let v = crate::seminorms::variation(&fam, 2.0).unwrap();
        let js = seminorm_to_json_string(&v).unwrap();
        let back = seminorm_from_json_str(&js).unwrap();
        assert_eq!(back, v);
        let _ = rat_int(0);
    }
}
