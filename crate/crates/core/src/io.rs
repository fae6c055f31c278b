//! JSON problem and report files.
//!
//! Matrices are `{"rows": r, "cols": c, "data": [...]}` in row-major order.
//! Entries are `[re, im]` pairs; real-field files may use bare numbers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{NonOrthoWitness, OrthoCertificate, SubspaceBasis, Tolerances, WeightedVector};
use crate::instances::Label;
use crate::linalg::{ComplexMatrix, Field};
use crate::scalar::Cx;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
}

/// A matrix entry: a bare real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Pair([f64; 2]),
}

impl Entry {
    pub fn value(self) -> Cx<f64> {
        match self {
            Entry::Real(x) => Cx::new(x, 0.0),
            Entry::Pair([a, b]) => Cx::new(a, b),
        }
    }

    pub fn encode(z: Cx<f64>, field: Field) -> Self {
        match field {
            Field::Real => Entry::Real(z.re),
            Field::Complex => Entry::Pair([z.re, z.im]),
        }
    }
}

pub fn encode_vector(v: &[Cx<f64>], field: Field) -> Vec<Entry> {
    v.iter().map(|&z| Entry::encode(z, field)).collect()
}

pub fn decode_vector(v: &[Entry]) -> Vec<Cx<f64>> {
    v.iter().map(|e| e.value()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Entry>,
}

impl MatrixJson {
    pub fn encode(m: &ComplexMatrix<f64>, field: Field) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: encode_vector(m.data(), field),
        }
    }

    /// Decodes and checks the entry count and the field tag.
    pub fn decode(&self, field: Field, what: &str) -> Result<ComplexMatrix<f64>, IoError> {
        if self.data.len() != self.rows * self.cols {
            return Err(IoError::Parse(format!(
                "{what}: {} entries for a {}x{} matrix",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        let data = decode_vector(&self.data);
        if field == Field::Real && data.iter().any(|z| z.im != 0.0) {
            return Err(IoError::Invalid(format!("{what}: complex entry in a real-field problem")));
        }
        ComplexMatrix::new(self.rows, self.cols, field, data).map_err(|e| IoError::Invalid(format!("{what}: {e}")))
    }
}

/// Partial tolerance overrides.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ToleranceOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_dec: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_cert: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_wit: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, mut base: Tolerances) -> Tolerances {
        if let Some(v) = self.eps_dec {
            base.eps_dec = v;
        }
        if let Some(v) = self.eps_cert {
            base.eps_cert = v;
        }
        if let Some(v) = self.eps_wit {
            base.eps_wit = v;
        }
        base
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub field: Field,
    #[serde(rename = "T")]
    pub t: MatrixJson,
    #[serde(rename = "W", default)]
    pub w: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
}

/// A parsed problem with decoded matrices.
#[derive(Debug, Clone)]
pub struct Problem {
    pub field: Field,
    pub t: ComplexMatrix<f64>,
    pub generators: Vec<ComplexMatrix<f64>>,
    pub tolerances: Tolerances,
    pub seed: Option<u64>,
    pub label: Option<Label>,
}

impl Problem {
    pub fn subspace(&self) -> crate::Result<SubspaceBasis<f64>> {
        SubspaceBasis::with_shape(self.generators.clone(), self.t.rows(), self.t.cols(), self.field)
    }
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, IoError> {
        serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))
    }

    pub fn read(path: &std::path::Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(|e| IoError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files serialize")
    }

    pub fn from_problem(
        t: &ComplexMatrix<f64>,
        generators: &[ComplexMatrix<f64>],
        field: Field,
        seed: Option<u64>,
        label: Option<Label>,
    ) -> Self {
        Self {
            field,
            t: MatrixJson::encode(t, field),
            w: generators.iter().map(|g| MatrixJson::encode(g, field)).collect(),
            tolerances: None,
            seed,
            label,
        }
    }

    /// Decodes the matrices and checks that they share one shape.
    pub fn decode(&self) -> Result<Problem, IoError> {
        let t = self.t.decode(self.field, "T")?;
        let mut generators = Vec::with_capacity(self.w.len());
        for (j, g) in self.w.iter().enumerate() {
            let g = g.decode(self.field, &format!("W[{j}]"))?;
            if g.shape() != t.shape() {
                return Err(IoError::Invalid(format!(
                    "W[{j}] is {}x{} but T is {}x{}",
                    g.rows(),
                    g.cols(),
                    t.rows(),
                    t.cols()
                )));
            }
            generators.push(g);
        }
        Ok(Problem {
            field: self.field,
            t,
            generators,
            tolerances: self.tolerances.unwrap_or_default().apply(Tolerances::default()),
            seed: self.seed,
            label: self.label,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub weight: f64,
    pub x: Vec<Entry>,
}

/// Density-matrix certificate payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    #[serde(rename = "P")]
    pub p: MatrixJson,
    pub decomposition: Vec<TermJson>,
}

impl CertificateJson {
    pub fn encode(cert: &OrthoCertificate<f64>, field: Field) -> Self {
        Self {
            p: MatrixJson::encode(&cert.p, field),
            decomposition: cert
                .decomposition
                .iter()
                .map(|t| TermJson {
                    weight: t.weight,
                    x: encode_vector(&t.x, field),
                })
                .collect(),
        }
    }

    pub fn decode(&self, field: Field) -> Result<OrthoCertificate<f64>, IoError> {
        Ok(OrthoCertificate {
            p: self.p.decode(field, "P")?,
            decomposition: self
                .decomposition
                .iter()
                .map(|t| WeightedVector {
                    weight: t.weight,
                    x: decode_vector(&t.x),
                })
                .collect(),
        })
    }
}

/// Norm-decreasing perturbation payload: `|T + step sum coeffs_j A_j|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub coeffs: Vec<Entry>,
    pub step: f64,
    pub perturbed_norm: f64,
    pub decrease: f64,
}

impl WitnessJson {
    pub fn encode(w: &NonOrthoWitness<f64>, norm_t: f64, field: Field) -> Self {
        Self {
            coeffs: encode_vector(&w.coeffs, field),
            step: w.step,
            perturbed_norm: norm_t + w.achieved,
            decrease: -w.achieved,
        }
    }

    pub fn decode(&self) -> NonOrthoWitness<f64> {
        NonOrthoWitness {
            coeffs: decode_vector(&self.coeffs),
            step: self.step,
            achieved: -self.decrease,
            halvings: 0,
        }
    }
}

/// Output of every CLI command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub tool_version: String,
    pub command: String,
    pub decision: String,
    pub field: Field,
    #[serde(rename = "norm_T")]
    pub norm_t: f64,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<serde_json::Value>,
    #[serde(default)]
    pub diagnostics: serde_json::Value,
}

impl ReportFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"field":"R","T":{"rows":2,"cols":2,"data":[1,0,0,1]},"W":[]}"#;

    #[test]
    fn minimal_problem() {
        let p = ProblemFile::from_json(MINIMAL).unwrap().decode().unwrap();
        assert!(p.generators.is_empty());
        assert_eq!(p.t, ComplexMatrix::identity(2, Field::Real));
        assert_eq!(p.tolerances, Tolerances::default());
    }

    #[test]
    fn wrong_entry_count() {
        let text = r#"{"field":"R","T":{"rows":2,"cols":2,"data":[1,0,0]},"W":[]}"#;
        let err = ProblemFile::from_json(text).unwrap().decode().unwrap_err();
        assert!(matches!(err, IoError::Parse(_)));
    }

    #[test]
    fn complex_entry_under_real_tag() {
        let text = r#"{"field":"R","T":{"rows":1,"cols":1,"data":[[1,2]]},"W":[]}"#;
        let err = ProblemFile::from_json(text).unwrap().decode().unwrap_err();
        assert!(matches!(err, IoError::Invalid(_)));
    }

    #[test]
    fn shape_mismatch_between_t_and_w() {
        let text = r#"{"field":"R","T":{"rows":1,"cols":1,"data":[1]},"W":[{"rows":1,"cols":2,"data":[1,2]}]}"#;
        assert!(ProblemFile::from_json(text).unwrap().decode().is_err());
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(ProblemFile::from_json("{\"field\":"), Err(IoError::Parse(_))));
        assert!(matches!(ProblemFile::from_json(r#"{"field":"Q","T":{"rows":1,"cols":1,"data":[1]}}"#), Err(IoError::Parse(_))));
    }

    #[test]
    fn tolerance_overrides() {
        let text = r#"{"field":"R","T":{"rows":1,"cols":1,"data":[1]},"tolerances":{"eps_dec":1e-5}}"#;
        let p = ProblemFile::from_json(text).unwrap().decode().unwrap();
        assert_eq!(p.tolerances.eps_dec, 1e-5);
        assert_eq!(p.tolerances.eps_cert, Tolerances::default().eps_cert);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let mut rng = crate::rng::InstanceRng::new(11);
        let t: ComplexMatrix<f64> = rng.matrix(3, 2, Field::Complex);
        let g: ComplexMatrix<f64> = rng.matrix(3, 2, Field::Complex);
        let file = ProblemFile::from_problem(&t, &[g.clone()], Field::Complex, Some(11), None);
        let back = ProblemFile::from_json(&file.to_json()).unwrap();
        assert_eq!(back, file);
        let p = back.decode().unwrap();
        assert_eq!(p.t, t);
        assert_eq!(p.generators[0], g);
    }

    #[test]
    fn certificate_round_trip() {
        let cert = OrthoCertificate::from_density(ComplexMatrix::diag_real(&[0.25, 0.75]));
        let json = CertificateJson::encode(&cert, Field::Real);
        let text = serde_json::to_string(&json).unwrap();
        let back: CertificateJson = serde_json::from_str(&text).unwrap();
        let decoded = back.decode(Field::Real).unwrap();
        assert_eq!(decoded.p, cert.p);
        assert_eq!(decoded.decomposition.len(), 2);
    }
}
