use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{LinkLoss, Variant};

/// How the link reconstruction term is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkLossMode {
    /// Exact below `sampled_threshold` nodes, sampled above.
    Auto,
    Exact,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub variant: Variant,
    /// Released embedding width.
    pub d: usize,
    /// Compressed code width.
    pub d_prime: usize,
    pub hidden: usize,
    pub lambda: f64,
    #[serde(alias = "T")]
    pub iterations: usize,
    pub k_att: usize,
    pub k_dis: usize,
    /// Adam step size for encoder, expansion and heads.
    pub lr: f64,
    pub disc_lr: f64,
    pub att_lr: f64,
    pub seed: u64,
    pub link_loss: LinkLossMode,
    pub negatives_per_positive: usize,
    pub sampled_threshold: usize,
    /// Fraction of edges hidden from training; 0 trains on all edges.
    pub edge_holdout: f64,
    /// Center and scale each feature column before propagation.
    pub standardize_features: bool,
    /// Let the in-training attacker see column-standardized embeddings.
    pub attacker_standardize: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            variant: Variant::Apge,
            d: 64,
            d_prime: 16,
            hidden: 128,
            lambda: 1.0,
            iterations: 200,
            k_att: 1,
            k_dis: 1,
            lr: 0.001,
            disc_lr: 0.001,
            att_lr: 0.001,
            seed: 0,
            link_loss: LinkLossMode::Auto,
            negatives_per_positive: 5,
            sampled_threshold: 3000,
            edge_holdout: 0.15,
            standardize_features: false,
            attacker_standardize: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.d == 0 || self.d_prime == 0 || self.hidden == 0 {
            return bad("d, d_prime and hidden must be positive".into());
        }
        if self.variant.has_expansion() && self.d < self.d_prime {
            return bad(format!(
                "d ({}) must be at least d_prime ({})",
                self.d, self.d_prime
            ));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad(format!(
                "lambda must be a finite value >= 0, got {}",
                self.lambda
            ));
        }
        if self.iterations == 0 {
            return bad("iterations must be positive".into());
        }
        if self.k_att == 0 || self.k_dis == 0 {
            return bad("k_att and k_dis must be at least 1".into());
        }
        for (name, lr) in [
            ("lr", self.lr),
            ("disc_lr", self.disc_lr),
            ("att_lr", self.att_lr),
        ] {
            if !(lr > 0.0 && lr.is_finite()) {
                return bad(format!("{name} must be positive, got {lr}"));
            }
        }
        if self.negatives_per_positive == 0 {
            return bad("negatives_per_positive must be positive".into());
        }
        if !(0.0..1.0).contains(&self.edge_holdout) {
            return bad(format!(
                "edge_holdout must lie in [0, 1), got {}",
                self.edge_holdout
            ));
        }
        Ok(())
    }

    /// Concrete link-loss mode for a graph with `n` nodes.
    pub fn link_loss_for(&self, n: usize) -> LinkLoss {
        let sampled = LinkLoss::Sampled {
            negatives_per_positive: self.negatives_per_positive,
        };
        match self.link_loss {
            LinkLossMode::Exact => LinkLoss::Exact,
            LinkLossMode::Sampled => sampled,
            LinkLossMode::Auto if n > self.sampled_threshold => sampled,
            LinkLossMode::Auto => LinkLoss::Exact,
        }
    }

    /// Released width for this variant.
    pub fn release_dim(&self) -> usize {
        if self.variant.compressed() && !self.variant.has_expansion() {
            self.d_prime
        } else {
            self.d
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gae_config_parses_without_lambda() {
        let cfg: TrainConfig = serde_json::from_str(r#"{"variant":"GAE","T":5}"#).unwrap();
        assert_eq!(cfg.variant, Variant::Gae);
        assert_eq!(cfg.iterations, 5);
        cfg.validate().unwrap();
    }

    #[test]
    fn yale_shaped_keys_are_accepted() {
        let cfg: TrainConfig =
            serde_json::from_str(r#"{"variant":"APGE","d":64,"d_prime":16,"lambda":1}"#).unwrap();
        assert_eq!((cfg.d, cfg.d_prime, cfg.lambda), (64, 16, 1.0));
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = TrainConfig::default();
        cfg.lambda = -1.0;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let cfg = TrainConfig {
            d: 8,
            d_prime: 16,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = TrainConfig {
            k_dis: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        assert!(serde_json::from_str::<TrainConfig>(r#"{"variant":"VAE"}"#).is_err());
        assert!(serde_json::from_str::<TrainConfig>(r#"{"depth":3}"#).is_err());
    }

    #[test]
    fn auto_mode_switches_above_threshold() {
        let cfg = TrainConfig::default();
        assert_eq!(cfg.link_loss_for(3000), LinkLoss::Exact);
        assert_eq!(
            cfg.link_loss_for(3001),
            LinkLoss::Sampled {
                negatives_per_positive: 5
            }
        );
    }
}
