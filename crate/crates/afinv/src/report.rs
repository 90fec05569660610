//! Canonical JSON invariant reports.
//!
//! Serialization conventions: keys sorted (serde_json's BTreeMap), exact
//! rationals as "p" or "p/q" strings, integers as JSON numbers when they
//! fit in i64 and strings otherwise, optional fields omitted when absent.
//! Reports parse back losslessly.

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::exactnum::{BigRational, IntMatrix};
use crate::jacobiperron::{jp_expand, JPDigit};
use crate::numberfield::quadratic_field_d;
use crate::pfdata::{coefficient_ring, module_from_perron, perron_data};
use crate::torusbundle::{bundle_invariants, TorusMonodromy};
use crate::traceform::{form_invariants, gram};

/// K presented either by the squarefree d of a quadratic field or by a
/// minimal polynomial (descending coefficients).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldDescriptor {
    QuadraticD(BigInt),
    Minpoly(Vec<BigInt>),
}

/// The assembled invariant report behind the `invariants` CLI command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantReport {
    pub input: IntMatrix,
    pub field: FieldDescriptor,
    pub conductor: Option<BigInt>,
    pub delta: BigRational,
    pub sigma: i64,
    /// Descending coefficients of t^n - ... (the Alexander polynomial for
    /// torus bundles, the characteristic polynomial in general).
    pub alexander: Vec<BigInt>,
    pub cf_preperiod: Option<Vec<BigInt>>,
    pub cf_period: Option<Vec<BigInt>>,
    /// One period of Jacobi-Perron digit vectors, canonically rotated.
    pub jp_period: Option<Vec<Vec<BigInt>>>,
    pub module_lattice: (IntMatrix, BigRational),
    pub order_basis: Vec<Vec<BigRational>>,
    pub order_basis_display: Option<Vec<String>>,
    /// Reduced-surd representative of the module's ideal class (quadratic
    /// pipeline only).
    pub class_representative: Option<String>,
    /// Isolating interval of the designated real root: the embedding is
    /// part of the report (comparisons elsewhere ignore it).
    pub embedding: (BigRational, BigRational),
    pub warnings: Vec<String>,
}

fn descending(p: &crate::exactnum::IntPoly) -> Vec<BigInt> {
    p.coeffs().iter().rev().cloned().collect()
}

/// Lexicographically smallest rotation of a word of digit vectors.
fn canonical_digit_rotation(w: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if w.is_empty() {
        return vec![];
    }
    (0..w.len())
        .map(|r| (0..w.len()).map(|i| w[(r + i) % w.len()].clone()).collect::<Vec<_>>())
        .min()
        .unwrap()
}

fn jp_period_of(pd: &crate::pfdata::PerronData, max_steps: usize) -> Option<Vec<Vec<BigInt>>> {
    let theta = pd.ratio_vector();
    if theta.is_empty() {
        return None;
    }
    let e = jp_expand(&theta, max_steps).ok()?;
    let digits = e.period_digits()?;
    Some(canonical_digit_rotation(
        &digits.iter().map(|d| d.entries().to_vec()).collect::<Vec<_>>(),
    ))
}

impl InvariantReport {
    /// Torus-bundle pipeline (2x2 hyperbolic input).
    pub fn from_torus_bundle(a: &TorusMonodromy, jp_steps: usize) -> Result<Self, Error> {
        let rep = bundle_invariants(a)?;
        let pd = perron_data(&rep.pipeline_matrix)?;
        let jp_period = jp_period_of(&pd, jp_steps);
        Ok(InvariantReport {
            input: rep.input,
            field: FieldDescriptor::QuadraticD(rep.d),
            conductor: Some(rep.conductor),
            delta: rep.invariants.delta.clone(),
            sigma: rep.invariants.sigma,
            alexander: descending(&rep.alexander),
            cf_preperiod: Some(rep.cf_preperiod),
            cf_period: Some(rep.cf_period),
            jp_period,
            module_lattice: rep.module_lattice,
            order_basis: pd_order_basis(&rep.pipeline_matrix)?,
            order_basis_display: Some(rep.order_basis),
            class_representative: Some(rep.class_representative),
            embedding: pd.field.pf_interval().clone(),
            warnings: rep.warnings,
        })
    }

    /// General n x n pipeline for primitive nonnegative matrices.
    pub fn from_general_matrix(a: &IntMatrix, jp_steps: usize) -> Result<Self, Error> {
        if a.rows() == 2 && a.cols() == 2 && a.det_exact()? == BigInt::one() {
            return Self::from_torus_bundle(&TorusMonodromy::new(a.clone())?, jp_steps);
        }
        let pd = perron_data(a)?;
        let module = module_from_perron(&pd)?;
        let order = coefficient_ring(&module)?;
        let inv = form_invariants(&gram(&module)?)?;
        let field = if pd.field.degree() == 2 {
            FieldDescriptor::QuadraticD(quadratic_field_d(&pd.field)?)
        } else {
            FieldDescriptor::Minpoly(descending(pd.field.minpoly()))
        };
        let display = if pd.field.degree() == 2 {
            Some(
                order
                    .basis
                    .iter()
                    .map(|b| {
                        crate::numberfield::QuadraticSurd::from_field_element(b)
                            .map(|s| s.to_string())
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            )
        } else {
            None
        };
        let lattice = module.lattice();
        let mut warnings = pd.warnings.clone();
        if !pd.field.irreducibility_verified() {
            warnings.push("minimal polynomial accepted without an irreducibility proof".into());
        }
        Ok(InvariantReport {
            input: a.clone(),
            field,
            conductor: order.conductor.clone(),
            delta: inv.delta.clone(),
            sigma: inv.sigma,
            alexander: descending(&a.charpoly()?),
            cf_preperiod: None,
            cf_period: None,
            jp_period: jp_period_of(&pd, jp_steps),
            module_lattice: (lattice.basis().clone(), lattice.scale().clone()),
            order_basis: order.basis.iter().map(|b| b.coords().to_vec()).collect(),
            order_basis_display: display,
            class_representative: None,
            embedding: pd.field.pf_interval().clone(),
            warnings,
        })
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("input".into(), matrix_value(&self.input));
        match &self.field {
            FieldDescriptor::QuadraticD(d) => {
                m.insert("field".into(), json!({ "d": bigint_value(d) }));
            }
            FieldDescriptor::Minpoly(c) => {
                m.insert(
                    "field".into(),
                    json!({ "minpoly": c.iter().map(bigint_value).collect::<Vec<_>>() }),
                );
            }
        }
        if let Some(f) = &self.conductor {
            m.insert("conductor".into(), bigint_value(f));
        }
        m.insert("delta".into(), Value::String(rational_str(&self.delta)));
        m.insert("sigma".into(), Value::Number(self.sigma.into()));
        m.insert(
            "alexander".into(),
            Value::Array(self.alexander.iter().map(bigint_value).collect()),
        );
        if let Some(p) = &self.cf_preperiod {
            m.insert(
                "cf_preperiod".into(),
                Value::Array(p.iter().map(bigint_value).collect()),
            );
        }
        if let Some(p) = &self.cf_period {
            m.insert("cf_period".into(), Value::Array(p.iter().map(bigint_value).collect()));
        }
        if let Some(p) = &self.jp_period {
            m.insert(
                "jp_period".into(),
                Value::Array(
                    p.iter()
                        .map(|d| Value::Array(d.iter().map(bigint_value).collect()))
                        .collect(),
                ),
            );
        }
        m.insert(
            "module_lattice".into(),
            json!({
                "basis": matrix_value(&self.module_lattice.0),
                "scale": rational_str(&self.module_lattice.1),
            }),
        );
        m.insert(
            "order_basis".into(),
            Value::Array(
                self.order_basis
                    .iter()
                    .map(|b| {
                        Value::Array(b.iter().map(|q| Value::String(rational_str(q))).collect())
                    })
                    .collect(),
            ),
        );
        if let Some(d) = &self.order_basis_display {
            m.insert(
                "order_basis_display".into(),
                Value::Array(d.iter().map(|s| Value::String(s.clone())).collect()),
            );
        }
        if let Some(c) = &self.class_representative {
            m.insert("class_representative".into(), Value::String(c.clone()));
        }
        m.insert(
            "embedding".into(),
            json!({
                "lo": rational_str(&self.embedding.0),
                "hi": rational_str(&self.embedding.1),
            }),
        );
        m.insert(
            "warnings".into(),
            Value::Array(self.warnings.iter().map(|s| Value::String(s.clone())).collect()),
        );
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<Self, Error> {
        let obj = v.as_object().ok_or_else(|| Error::Usage("report must be an object".into()))?;
        let get = |k: &str| obj.get(k).ok_or_else(|| Error::Usage(format!("missing key {}", k)));
        let field_obj =
            get("field")?.as_object().ok_or_else(|| Error::Usage("field must be an object".into()))?;
        let field = if let Some(d) = field_obj.get("d") {
            FieldDescriptor::QuadraticD(parse_bigint_value(d)?)
        } else if let Some(mp) = field_obj.get("minpoly") {
            FieldDescriptor::Minpoly(parse_bigint_array(mp)?)
        } else {
            return Err(Error::Usage("field needs d or minpoly".into()));
        };
        let lattice_obj = get("module_lattice")?
            .as_object()
            .ok_or_else(|| Error::Usage("module_lattice must be an object".into()))?;
        Ok(InvariantReport {
            input: parse_matrix_value(get("input")?)?,
            field,
            conductor: obj.get("conductor").map(parse_bigint_value).transpose()?,
            delta: parse_rational_str(
                get("delta")?
                    .as_str()
                    .ok_or_else(|| Error::Usage("delta must be a string".into()))?,
            )?,
            sigma: get("sigma")?
                .as_i64()
                .ok_or_else(|| Error::Usage("sigma must be an integer".into()))?,
            alexander: parse_bigint_array(get("alexander")?)?,
            cf_preperiod: obj.get("cf_preperiod").map(parse_bigint_array).transpose()?,
            cf_period: obj.get("cf_period").map(parse_bigint_array).transpose()?,
            jp_period: obj
                .get("jp_period")
                .map(|v| {
                    v.as_array()
                        .ok_or_else(|| Error::Usage("jp_period must be an array".into()))?
                        .iter()
                        .map(parse_bigint_array)
                        .collect::<Result<Vec<_>, _>>()
                })
                .transpose()?,
            module_lattice: (
                parse_matrix_value(
                    lattice_obj
                        .get("basis")
                        .ok_or_else(|| Error::Usage("missing lattice basis".into()))?,
                )?,
                parse_rational_str(
                    lattice_obj
                        .get("scale")
                        .and_then(|s| s.as_str())
                        .ok_or_else(|| Error::Usage("missing lattice scale".into()))?,
                )?,
            ),
            order_basis: get("order_basis")?
                .as_array()
                .ok_or_else(|| Error::Usage("order_basis must be an array".into()))?
                .iter()
                .map(|b| {
                    b.as_array()
                        .ok_or_else(|| Error::Usage("order basis entry must be an array".into()))?
                        .iter()
                        .map(|q| {
                            parse_rational_str(q.as_str().ok_or_else(|| {
                                Error::Usage("order basis coordinate must be a string".into())
                            })?)
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?,
            order_basis_display: obj
                .get("order_basis_display")
                .map(|v| {
                    v.as_array()
                        .ok_or_else(|| Error::Usage("display must be an array".into()))?
                        .iter()
                        .map(|s| {
                            s.as_str().map(String::from).ok_or_else(|| {
                                Error::Usage("display entry must be a string".into())
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .transpose()?,
            class_representative: obj
                .get("class_representative")
                .map(|v| {
                    v.as_str().map(String::from).ok_or_else(|| {
                        Error::Usage("class_representative must be a string".into())
                    })
                })
                .transpose()?,
            embedding: {
                let e = get("embedding")?
                    .as_object()
                    .ok_or_else(|| Error::Usage("embedding must be an object".into()))?;
                let side = |k: &str| {
                    e.get(k)
                        .and_then(|v| v.as_str())
                        .ok_or_else(|| Error::Usage(format!("embedding needs {}", k)))
                        .and_then(parse_rational_str)
                };
                (side("lo")?, side("hi")?)
            },
            warnings: get("warnings")?
                .as_array()
                .ok_or_else(|| Error::Usage("warnings must be an array".into()))?
                .iter()
                .map(|s| {
                    s.as_str()
                        .map(String::from)
                        .ok_or_else(|| Error::Usage("warning must be a string".into()))
                })
                .collect::<Result<Vec<_>, _>>()?,
        })
    }
}

fn pd_order_basis(matrix: &IntMatrix) -> Result<Vec<Vec<BigRational>>, Error> {
    let pd = perron_data(matrix)?;
    let module = module_from_perron(&pd)?;
    let order = coefficient_ring(&module)?;
    Ok(order.basis.iter().map(|b| b.coords().to_vec()).collect())
}

// ---------------------------------------------------------------------------
// JSON primitives
// ---------------------------------------------------------------------------

/// "p" for integers, "p/q" otherwise.
pub fn rational_str(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational_str(s: &str) -> Result<BigRational, Error> {
    let parse_int = |t: &str| {
        t.parse::<BigInt>().map_err(|_| Error::Usage(format!("bad integer '{}'", t)))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den == BigInt::from(0) {
                return Err(Error::Usage("zero denominator".into()));
            }
            Ok(BigRational::new(parse_int(n)?, den))
        }
    }
}

/// Integers become JSON numbers when they fit in i64, strings otherwise.
pub fn bigint_value(n: &BigInt) -> Value {
    match i64::try_from(n.clone()) {
        Ok(v) => Value::Number(v.into()),
        Err(_) => Value::String(n.to_string()),
    }
}

pub fn parse_bigint_value(v: &Value) -> Result<BigInt, Error> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Usage("non-integer number".into())),
        Value::String(s) => {
            s.parse::<BigInt>().map_err(|_| Error::Usage(format!("bad integer '{}'", s)))
        }
        _ => Err(Error::Usage("expected an integer".into())),
    }
}

fn parse_bigint_array(v: &Value) -> Result<Vec<BigInt>, Error> {
    v.as_array()
        .ok_or_else(|| Error::Usage("expected an array of integers".into()))?
        .iter()
        .map(parse_bigint_value)
        .collect()
}

pub fn matrix_value(m: &IntMatrix) -> Value {
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "entries": m.entries().iter().map(bigint_value).collect::<Vec<_>>(),
    })
}

pub fn parse_matrix_value(v: &Value) -> Result<IntMatrix, Error> {
    let obj = v.as_object().ok_or_else(|| Error::Usage("matrix must be an object".into()))?;
    let rows = obj
        .get("rows")
        .and_then(|r| r.as_u64())
        .ok_or_else(|| Error::Usage("matrix needs rows".into()))? as usize;
    let cols = obj
        .get("cols")
        .and_then(|c| c.as_u64())
        .map(|c| c as usize)
        .unwrap_or(rows);
    let entries = parse_bigint_array(
        obj.get("entries").ok_or_else(|| Error::Usage("matrix needs entries".into()))?,
    )?;
    IntMatrix::new(rows, cols, entries)
}

/// One period of JP digits as a JSON value.
pub fn jp_digits_value(digits: &[JPDigit]) -> Value {
    Value::Array(
        digits
            .iter()
            .map(|d| Value::Array(d.entries().iter().map(bigint_value).collect()))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::big;

    #[test]
    fn report_round_trips_through_json() {
        let a = TorusMonodromy::from_i64(&[5, 2, 2, 1]).unwrap();
        let rep = InvariantReport::from_torus_bundle(&a, 100).unwrap();
        let v = rep.to_json();
        let back = InvariantReport::from_json(&v).unwrap();
        assert_eq!(back, rep);
        // Serialization is stable.
        assert_eq!(v.to_string(), InvariantReport::from_json(&v).unwrap().to_json().to_string());
    }

    #[test]
    fn golden_report_values() {
        let a = TorusMonodromy::from_i64(&[5, 2, 2, 1]).unwrap();
        let rep = InvariantReport::from_torus_bundle(&a, 100).unwrap();
        let v = rep.to_json();
        let s = v.to_string();
        assert!(s.contains("\"delta\":\"8\""));
        assert!(s.contains("\"sigma\":2"));
        assert!(s.contains("\"cf_period\":[2]"));
        assert!(s.contains("\"conductor\":1"));
        let b = TorusMonodromy::from_i64(&[5, 1, 4, 1]).unwrap();
        let rep = InvariantReport::from_torus_bundle(&b, 100).unwrap();
        let s = rep.to_json().to_string();
        assert!(s.contains("\"delta\":\"32\""));
        assert!(s.contains("\"cf_period\":[1,4]"));
        assert!(s.contains("\"alexander\":[1,-6,1]"));
    }

    #[test]
    fn general_matrix_report() {
        let a0 = IntMatrix::from_i64(3, 3, &[1, 1, 1, 1, 0, 0, 0, 1, 0]).unwrap();
        let rep = InvariantReport::from_general_matrix(&a0, 100).unwrap();
        match &rep.field {
            FieldDescriptor::Minpoly(c) => {
                assert_eq!(c, &vec![big(1), big(-1), big(-1), big(-1)]);
            }
            other => panic!("expected cubic minpoly, got {:?}", other),
        }
        assert!(rep.conductor.is_none());
        assert!(rep.cf_period.is_none());
        assert!(rep.jp_period.is_some());
        let back = InvariantReport::from_json(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn rational_strings() {
        assert_eq!(rational_str(&BigRational::new(big(8), big(1))), "8");
        assert_eq!(rational_str(&BigRational::new(big(-3), big(2))), "-3/2");
        assert_eq!(parse_rational_str("8").unwrap(), BigRational::from_integer(big(8)));
        assert_eq!(parse_rational_str("-3/2").unwrap(), BigRational::new(big(-3), big(2)));
        assert!(parse_rational_str("1/0").is_err());
    }
}
