//! Representation files: the images of the generators as complex matrices,
//! with the central data they were solved for.
//!
//! ```toml
//! group_id = "su2"
//! central_target = []
//! central_twist = 1
//!
//! [[images]]
//! re = [[0.0, 0.0], [0.0, 0.0]]
//! im = [[0.0, 1.0], [1.0, 0.0]]
//! ```
//!
//! Floats are written in shortest round-trip form, so write-then-read is
//! bit-exact.

use std::path::{Path, PathBuf};

use nalgebra::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use moduli_core::lie::CMatrix;
use moduli_core::{AlgebraElement, CentralRep, GroupElement, GroupId, LieContext};

#[derive(Debug, Error)]
pub enum RepFileError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed representation file: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] moduli_core::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageEntry {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepFile {
    pub group_id: String,
    /// Central value in center coordinates.
    #[serde(default)]
    pub central_target: Vec<f64>,
    #[serde(default)]
    pub central_twist: usize,
    pub images: Vec<ImageEntry>,
}

fn entry(m: &CMatrix) -> ImageEntry {
    let rows = |f: fn(&Complex<f64>) -> f64| {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
            .collect()
    };
    ImageEntry {
        re: rows(|z| z.re),
        im: rows(|z| z.im),
    }
}

fn matrix(e: &ImageEntry, size: usize) -> Result<CMatrix, RepFileError> {
    let square = |rows: &Vec<Vec<f64>>| rows.len() == size && rows.iter().all(|r| r.len() == size);
    if !square(&e.re) || !square(&e.im) {
        return Err(RepFileError::Parse(format!(
            "every image must be a {size}x{size} matrix"
        )));
    }
    Ok(CMatrix::from_fn(size, size, |i, j| {
        Complex::new(e.re[i][j], e.im[i][j])
    }))
}

impl RepFile {
    pub fn from_rep(rep: &CentralRep) -> Self {
        let ctx = rep.context();
        let x = rep.x_xi();
        let twist_element = ctx.exp_alg(x).inverse().mul(rep.central_target());
        let central_twist = ctx
            .discrete_center()
            .iter()
            .enumerate()
            .min_by(|a, b| {
                a.1.distance(&twist_element)
                    .total_cmp(&b.1.distance(&twist_element))
            })
            .map(|(i, _)| i)
            .unwrap_or(0);
        Self {
            group_id: ctx.group_id().to_string(),
            central_target: ctx.center_basis().iter().map(|&i| x.coeffs[i]).collect(),
            central_twist,
            images: rep.images().iter().map(|a| entry(a.matrix())).collect(),
        }
    }

    /// Validates group membership and central data; the relator defect is
    /// checked later, when the complex is built.
    pub fn to_rep(&self) -> Result<CentralRep, RepFileError> {
        let group: GroupId = self
            .group_id
            .parse()
            .map_err(|e: moduli_core::LieError| RepFileError::Parse(e.to_string()))?;
        let ctx = LieContext::new(group);
        let center = ctx.center_basis();
        if self.central_target.len() != center.len() {
            return Err(RepFileError::Parse(format!(
                "central_target has {} coordinates, expected {}",
                self.central_target.len(),
                center.len()
            )));
        }
        let mut x = AlgebraElement::zero(ctx.dim());
        for (&i, &v) in center.iter().zip(&self.central_target) {
            x.coeffs[i] = v;
        }
        let images = self
            .images
            .iter()
            .map(|e| {
                Ok(GroupElement::from_matrix_unchecked(matrix(
                    e,
                    ctx.matrix_size(),
                )?))
            })
            .collect::<Result<Vec<_>, RepFileError>>()?;
        Ok(CentralRep::with_twist(ctx, images, x, self.central_twist)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("representation files serialize")
    }

    pub fn from_toml(text: &str) -> Result<Self, RepFileError> {
        toml::from_str(text).map_err(|e| RepFileError::Parse(e.to_string()))
    }
}

pub fn write_rep(path: &Path, rep: &CentralRep) -> Result<(), RepFileError> {
    std::fs::write(path, RepFile::from_rep(rep).to_toml()).map_err(|source| RepFileError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_rep(path: &Path) -> Result<CentralRep, RepFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| RepFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    RepFile::from_toml(&text)?.to_rep()
}

#[cfg(test)]
mod tests {
    use super::*;
    use moduli_core::{find_central_rep, RepStrategy, Tolerances};

    fn bits(rep: &CentralRep) -> Vec<u64> {
        rep.images()
            .iter()
            .flat_map(|a| {
                a.matrix()
                    .iter()
                    .flat_map(|z| [z.re.to_bits(), z.im.to_bits()])
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        for (group, x, twist) in [
            (GroupId::SU2, vec![0.0; 3], 1),
            (GroupId::U2, vec![std::f64::consts::PI, 0.0, 0.0, 0.0], 0),
        ] {
            let ctx = LieContext::new(group);
            let mut rng = moduli_core::rng::stream(4, "test");
            let rep = find_central_rep(
                &ctx,
                2,
                &AlgebraElement::from_slice(&x),
                twist,
                RepStrategy::RandomPolish,
                &Tolerances::default(),
                &mut rng,
            )
            .unwrap();
            let file = RepFile::from_rep(&rep);
            assert_eq!(file.central_twist, twist);
            let back = RepFile::from_toml(&file.to_toml())
                .unwrap()
                .to_rep()
                .unwrap();
            assert_eq!(bits(&rep), bits(&back));
            assert_eq!(rep.x_xi(), back.x_xi());
            assert_eq!(rep.defect(), back.defect());
        }
    }

    #[test]
    fn rejects_malformed() {
        let bad_shape = "group_id = \"su2\"\n[[images]]\nre = [[1.0]]\nim = [[0.0]]\n";
        assert!(matches!(
            RepFile::from_toml(bad_shape).unwrap().to_rep(),
            Err(RepFileError::Parse(_))
        ));
        let not_unitary = "group_id = \"u1\"\ncentral_target = [0.0]\n[[images]]\nre = [[2.0]]\nim = [[0.0]]\n[[images]]\nre = [[1.0]]\nim = [[0.0]]\n";
        assert!(matches!(
            RepFile::from_toml(not_unitary).unwrap().to_rep(),
            Err(RepFileError::Core(_))
        ));
        assert!(matches!(
            RepFile::from_toml("group_id = 3"),
            Err(RepFileError::Parse(_))
        ));
    }
}
