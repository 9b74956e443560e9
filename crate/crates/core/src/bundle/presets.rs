use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ModelBundle;
use crate::curvature::charts::{euclidean, round_sphere};
use crate::curvature::ChartMetric;
use crate::error::{GeomError, Result};
use crate::smoothing::profile_by_name;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasePreset {
    /// Unit round sphere in stereographic coordinates.
    Sphere,
    /// Flat torus, seen through the identity chart of its universal cover.
    Torus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QPreset {
    Zero,
    /// Constant generators; they fail to commute once `k ≥ 3`.
    Constant,
    /// Position-dependent combinations of fixed generators.
    Varying,
}

pub fn base_chart(preset: BasePreset, n: usize) -> ChartMetric {
    match preset {
        BasePreset::Sphere => round_sphere(n, 1.0),
        BasePreset::Torus => euclidean(n),
    }
}

/// Generators `e_a e_bᵀ − e_b e_aᵀ` of `so(k)`, ordered so that consecutive
/// ones do not commute.
fn generators(k: usize) -> Vec<DMatrix<f64>> {
    let mut pairs = Vec::new();
    for gap in 1..k {
        for a in 0..k - gap {
            pairs.push((a, a + gap));
        }
    }
    pairs
        .into_iter()
        .map(|(a, b)| {
            let mut m = DMatrix::zeros(k, k);
            m[(a, b)] = 1.0;
            m[(b, a)] = -1.0;
            m
        })
        .collect()
}

pub fn connection_preset(
    preset: QPreset,
    n: usize,
    k: usize,
    scale: f64,
) -> impl Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync + 'static {
    let gens = generators(k);
    move |p: &[f64]| match preset {
        QPreset::Zero => vec![DMatrix::zeros(k, k); n],
        QPreset::Constant => (0..n).map(|i| &gens[i % gens.len()] * scale).collect(),
        QPreset::Varying => (0..n)
            .map(|i| {
                let mut q = DMatrix::zeros(k, k);
                for (m, g) in gens.iter().take(3).enumerate() {
                    let c = (0.3 * (i + 1) as f64 + 0.7 * (m + 1) as f64 * p[(i + m + 1) % n]).sin();
                    q += g * (scale * c);
                }
                q
            })
            .collect(),
    }
}

fn default_q_scale() -> f64 {
    0.5
}

/// Structured bundle description: `{base, n, k, Q, warp, L}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleConfig {
    pub base: BasePreset,
    pub n: usize,
    pub k: usize,
    #[serde(rename = "Q")]
    pub q: QPreset,
    #[serde(default = "default_q_scale")]
    pub q_scale: f64,
    pub warp: String,
    #[serde(rename = "L")]
    pub l: f64,
}

impl BundleConfig {
    pub fn build(&self) -> Result<ModelBundle> {
        if self.n < 2 {
            return Err(GeomError::Precondition(format!("base dimension must be at least 2, got {}", self.n)));
        }
        let profile = profile_by_name(&self.warp)?;
        ModelBundle::new(
            base_chart(self.base, self.n),
            self.k,
            connection_preset(self.q, self.n, self.k, self.q_scale),
            profile,
            self.l,
        )
    }
}
