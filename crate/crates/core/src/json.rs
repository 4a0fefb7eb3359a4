//! JSON interchange for complexes and analysis reports.
//!
//! The complex document is the format every CLI command reads and writes:
//! `{"d": int, "types": {vertex: int, ...} | null,
//!   "facets": [{"verts": [str, ...], "w": float}, ...]}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::complex::{Face, TypeSet, WeightedComplex};
use crate::error::{Error, Result};
use crate::partite::{DependencyGraph, EpsilonTable, ProductDecomposition};
use crate::spectra::SpectralProfile;
use crate::trickledown::fvectors::FVectors;
use crate::trickledown::verify::{BoundProfile, MatrixReport, ScalarReport};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FacetDoc {
    pub verts: Vec<String>,
    pub w: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub d: usize,
    pub types: Option<BTreeMap<String, usize>>,
    pub facets: Vec<FacetDoc>,
}

impl ComplexDoc {
    pub fn from_complex(x: &WeightedComplex) -> ComplexDoc {
        let types = x.is_partite().then(|| {
            (0..x.num_vertices() as u32)
                .map(|v| (x.vertex_name(v).to_string(), x.type_of(v).unwrap()))
                .collect()
        });
        ComplexDoc {
            d: x.dim(),
            types,
            facets: x
                .facets()
                .iter()
                .map(|f| FacetDoc {
                    verts: f
                        .verts
                        .iter()
                        .map(|&v| x.vertex_name(v).to_string())
                        .collect(),
                    w: f.weight,
                })
                .collect(),
        }
    }

    pub fn into_complex(self) -> Result<WeightedComplex> {
        let facets: Vec<(Vec<String>, f64)> =
            self.facets.into_iter().map(|f| (f.verts, f.w)).collect();
        let x = WeightedComplex::build(&facets, self.types.as_ref())?;
        if x.dim() != self.d {
            return Err(Error::BadParams(format!(
                "declared dimension {} but facets have dimension {}",
                self.d,
                x.dim()
            )));
        }
        Ok(x)
    }
}

pub fn complex_to_json(x: &WeightedComplex) -> Value {
    serde_json::to_value(ComplexDoc::from_complex(x)).expect("complex serializes")
}

pub fn complex_from_json(text: &str) -> Result<WeightedComplex> {
    let doc: ComplexDoc =
        serde_json::from_str(text).map_err(|e| Error::BadParams(format!("malformed JSON: {e}")))?;
    doc.into_complex()
}

fn face_names(x: &WeightedComplex, face: &Face) -> Value {
    json!(x.face_names(face))
}

fn labels_of(s: &TypeSet) -> Vec<usize> {
    s.labels()
}

/// `{"gamma": {"2": g2, ...}, "argmax_faces": {...}, "witnesses": [...]}`
pub fn profile_to_json(x: &WeightedComplex, p: &SpectralProfile, eig_tol: f64) -> Value {
    let gamma: BTreeMap<String, f64> = p
        .gamma
        .iter()
        .map(|(k, e)| (k.to_string(), e.gamma))
        .collect();
    let argmax: BTreeMap<String, Value> = p
        .gamma
        .iter()
        .map(|(k, e)| (k.to_string(), face_names(x, &e.argmax)))
        .collect();
    let witnesses: Vec<Value> = p.witnesses.iter().map(|f| face_names(x, f)).collect();
    let mut out = json!({
        "gamma": gamma,
        "argmax_faces": argmax,
        "witnesses": witnesses,
        "tolerance": eig_tol,
    });
    if let Some(pt) = &p.per_type {
        out["per_type"] = json!(pt
            .iter()
            .map(|(s, g)| json!({"types": labels_of(s), "gamma": g}))
            .collect::<Vec<_>>());
    }
    out
}

/// `{"eps": [{"i", "j", "value", "argmax_face"}...],
///   "Delta": {"per_i": {...}, "max": int}, "components": [[int,...],...]}`
pub fn epsilon_to_json(
    x: &WeightedComplex,
    eps: &EpsilonTable,
    graph: &DependencyGraph,
) -> Value {
    let rows: Vec<Value> = eps
        .pairs()
        .map(|(i, j, e)| {
            json!({
                "i": i,
                "j": j,
                "value": e.value,
                "raw": e.raw,
                "argmax_face": face_names(x, &e.argmax),
            })
        })
        .collect();
    let per_i: BTreeMap<String, usize> = eps
        .labels()
        .iter()
        .map(|&i| (i.to_string(), graph.degree(i)))
        .collect();
    json!({
        "eps": rows,
        "Delta": {"per_i": per_i, "max": graph.max_degree()},
        "components": graph.components().iter().map(labels_of).collect::<Vec<_>>(),
        "tolerance": graph.tolerance(),
    })
}

pub fn decomposition_to_json(dec: &ProductDecomposition) -> Value {
    json!({
        "components": dec.components.iter().map(labels_of).collect::<Vec<_>>(),
        "residual": dec.residual,
        "choice_residual": dec.choice_residual,
    })
}

pub fn fvectors_to_json(f: &FVectors) -> Value {
    let entries: Vec<Value> = f
        .subsets()
        .map(|s| {
            let vals: BTreeMap<String, f64> = f
                .f(s)
                .unwrap()
                .iter()
                .map(|(&i, &v)| (i.to_string(), v))
                .collect();
            json!({"S": labels_of(&s), "f": vals})
        })
        .collect();
    json!({
        "delta": f.delta(),
        "c": f.c(),
        "ordering": format!("{:?}", f.ordering()).to_lowercase(),
        "g_coefficient": crate::trickledown::fvectors::G_COEFFICIENT,
        "c_prime": crate::trickledown::fvectors::C_PRIME,
        "f": entries,
    })
}

pub fn scalar_report_to_json(r: &ScalarReport) -> Value {
    json!({
        "pass": r.pass,
        "worst_cap_margin": r.worst_cap_margin,
        "worst_base_margin": r.worst_base_margin,
        "worst_recursion_margin": r.worst_recursion_margin,
        "worst_sum_rule_residual": r.worst_sum_rule_residual,
        "exact_tolerance": r.exact_tol,
        "eig_tolerance": r.eig_tol,
    })
}

pub fn matrix_report_to_json(r: &MatrixReport) -> Value {
    json!({
        "pass": r.pass,
        "worst_base_psd": r.worst_base_psd,
        "worst_base_cap": r.worst_base_cap,
        "worst_cap": r.worst_cap,
        "worst_recursion": r.worst_recursion,
        "max_product_deviation": r.max_product_deviation,
        "rho_consistency": r.rho_consistency,
        "tolerance": r.psd_tol,
    })
}

pub fn bound_profile_to_json(p: &BoundProfile) -> Value {
    let rows: Vec<Value> = p
        .rows
        .iter()
        .map(|r| {
            json!({
                "codim": r.codim,
                "exact": r.exact,
                "certified": r.certified,
                "classical": r.classical,
                "thm13": r.thm13,
                "main": r.main,
                "slack": r.slack,
            })
        })
        .collect();
    let per_type: Vec<Value> = p
        .per_type
        .iter()
        .map(|(s, (bound, exact))| {
            json!({"types": labels_of(s), "certified": bound, "exact": exact})
        })
        .collect();
    json!({"rows": rows, "per_type": per_type})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_roundtrip() {
        let x = crate::zoo::hardcore_complex(2, 0.7).unwrap();
        let text = serde_json::to_string_pretty(&complex_to_json(&x)).unwrap();
        let y = complex_from_json(&text).unwrap();
        assert_eq!(x.num_facets(), y.num_facets());
        assert_eq!(x.dim(), y.dim());
        for (a, b) in x.facets().iter().zip(y.facets()) {
            assert_eq!(a.verts, b.verts);
            assert!((a.weight - b.weight).abs() < 1e-15);
        }
    }

    #[test]
    fn malformed_json_rejected() {
        assert!(matches!(
            complex_from_json("{not json"),
            Err(Error::BadParams(_))
        ));
        // purity violation surfaces an error, not a panic
        let bad = r#"{"d": 1, "types": null,
            "facets": [{"verts": ["a"], "w": 1.0}, {"verts": ["a", "b"], "w": 1.0}]}"#;
        assert!(matches!(complex_from_json(bad), Err(Error::NonPure { .. })));
    }

    #[test]
    fn declared_dimension_checked() {
        let bad = r#"{"d": 3, "types": null, "facets": [{"verts": ["a", "b"], "w": 1.0}]}"#;
        assert!(complex_from_json(bad).is_err());
    }

    #[test]
    fn reports_are_byte_stable() {
        let x = crate::zoo::hardcore_complex(2, 0.7).unwrap();
        let p1 = crate::spectra::spectral_profile(&x);
        let p2 = crate::spectra::spectral_profile(&x);
        let a = serde_json::to_string(&profile_to_json(&x, &p1, 1e-10)).unwrap();
        let b = serde_json::to_string(&profile_to_json(&x, &p2, 1e-10)).unwrap();
        assert_eq!(a, b);
    }
}
