use serde::{Deserialize, Serialize};

use super::{SparseVector, Vocabulary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdfVariant {
    /// `ln((1 + N) / (1 + df)) + 1`, always positive.
    Smooth,
    /// `ln(N / df)`; terms present in every document get weight 0 and vanish.
    Plain,
}

impl IdfVariant {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "smooth" => Ok(Self::Smooth),
            "plain" => Ok(Self::Plain),
            other => Err(Error::InvalidConfig(format!("unknown idf variant '{other}'"))),
        }
    }

    pub fn idf(self, n_docs: usize, df: u32) -> f64 {
        let (n, df) = (n_docs as f64, df as f64);
        match self {
            Self::Smooth => ((1.0 + n) / (1.0 + df)).ln() + 1.0,
            Self::Plain => (n / df).ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdfModel {
    pub variant: IdfVariant,
    pub n_docs: usize,
    pub idf: Vec<f64>,
}

impl IdfModel {
    /// Reads N and df from the (training) vocabulary.
    pub fn fit(vocab: &Vocabulary, variant: IdfVariant) -> Self {
        let idf = (0..vocab.len())
            .map(|i| variant.idf(vocab.n_docs(), vocab.df(i)))
            .collect();
        Self {
            variant,
            n_docs: vocab.n_docs(),
            idf,
        }
    }

    /// `count · idf` per term, then L2 normalization of the whole vector.
    pub fn transform(&self, counts: &SparseVector) -> SparseVector {
        let weighted = counts.map_values(|i, c| c * self.idf[i]);
        let norm = weighted.l2_norm();
        if norm == 0.0 {
            return weighted;
        }
        weighted.map_values(|_, w| w / norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_idf_values() {
        assert_eq!(IdfVariant::Smooth.idf(2, 2), 1.0);
        assert!((IdfVariant::Smooth.idf(2, 1) - 1.405_465).abs() < 1e-6);
        assert_eq!(IdfVariant::Smooth.idf(1, 1), 1.0);
    }

    #[test]
    fn plain_idf_values() {
        assert_eq!(IdfVariant::Plain.idf(4, 4), 0.0);
        assert!((IdfVariant::Plain.idf(4, 1) - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn transform_normalizes() {
        let model = IdfModel {
            variant: IdfVariant::Smooth,
            n_docs: 2,
            idf: vec![1.0, 1.5f64.ln() + 1.0],
        };
        let counts = SparseVector::from_pairs(2, vec![(0, 2.0), (1, 1.0)]);
        let v = model.transform(&counts);
        assert!((v.values()[0] - 0.818_180).abs() < 1e-6);
        assert!((v.values()[1] - 0.574_962).abs() < 1e-6);
        assert!(model.transform(&SparseVector::empty(2)).is_empty());
        let one_hot = model.transform(&SparseVector::from_pairs(2, vec![(0, 5.0)]));
        assert_eq!(one_hot.values(), &[1.0]);
    }

    #[test]
    fn plain_variant_drops_ubiquitous_terms() {
        let model = IdfModel {
            variant: IdfVariant::Plain,
            n_docs: 3,
            idf: vec![0.0, 3f64.ln()],
        };
        let v = model.transform(&SparseVector::from_pairs(2, vec![(0, 4.0), (1, 1.0)]));
        assert_eq!(v.indices(), &[1]);
        assert_eq!(v.values(), &[1.0]);
    }
}
