//! Synthetic attributed graphs with a planted private-attribute signal.
//!
//! Topology is a stochastic block model over the private label, so the
//! private attribute leaks through structure even when it is removed from
//! the feature matrix. The utility label copies a private-derived class with
//! probability `rho`, and a feature-only attribute is a noisy copy of the
//! utility label.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphcore::{AttributeRole, AttributeSchema, AttributeSpec, Graph};
use crate::numkit::Rng;

pub const PRIVATE: &str = "private";
pub const UTILITY: &str = "utility";
pub const FEATURE: &str = "feature";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthParams {
    pub n: usize,
    pub private_classes: usize,
    pub utility_classes: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub rho: f64,
    pub flip: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            n: 500,
            private_classes: 2,
            utility_classes: 4,
            p_in: 0.08,
            p_out: 0.01,
            rho: 0.3,
            flip: 0.1,
            seed: 0,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !(unit(self.p_out) && unit(self.p_in) && self.p_out <= self.p_in) {
            return Err(Error::Config(format!(
                "need 0 <= p_out <= p_in <= 1, got p_out={} p_in={}",
                self.p_out, self.p_in
            )));
        }
        if !unit(self.rho) || !unit(self.flip) {
            return Err(Error::Config("rho and flip must lie in [0, 1]".into()));
        }
        if self.private_classes < 2 || self.utility_classes < 2 {
            return Err(Error::Config(
                "private and utility attributes need >= 2 classes".into(),
            ));
        }
        if self.n < self.private_classes * self.utility_classes {
            return Err(Error::Config(format!(
                "n = {} is smaller than private_classes * utility_classes",
                self.n
            )));
        }
        Ok(())
    }

    pub fn schema(&self) -> AttributeSchema {
        AttributeSchema::new(vec![
            AttributeSpec {
                name: PRIVATE.into(),
                classes: self.private_classes,
                role: AttributeRole::Private,
            },
            AttributeSpec {
                name: UTILITY.into(),
                classes: self.utility_classes,
                role: AttributeRole::Utility,
            },
            AttributeSpec {
                name: FEATURE.into(),
                classes: self.utility_classes,
                role: AttributeRole::FeatureOnly,
            },
        ])
        .expect("synthetic schema is valid")
    }

    /// Expected edge count: block-pair counts times their probabilities.
    pub fn expected_edges(&self, private: &[u32]) -> f64 {
        let mut sizes = vec![0f64; self.private_classes];
        for &p in private {
            sizes[p as usize - 1] += 1.0;
        }
        let n = private.len() as f64;
        let within: f64 = sizes.iter().map(|s| s * (s - 1.0) / 2.0).sum();
        let all = n * (n - 1.0) / 2.0;
        within * self.p_in + (all - within) * self.p_out
    }
}

pub fn synth_graph(params: &SynthParams) -> Result<(Graph, AttributeSchema)> {
    params.validate()?;
    let n = params.n;
    let (mp, mu) = (params.private_classes, params.utility_classes);

    let mut private: Vec<u32> = (0..n).map(|i| (i % mp) as u32 + 1).collect();
    Rng::for_component(params.seed, "synth/private").shuffle(&mut private);

    let mut rng = Rng::for_component(params.seed, "synth/edges");
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if private[u] == private[v] {
                params.p_in
            } else {
                params.p_out
            };
            if rng.bernoulli(p) {
                edges.push((u, v));
            }
        }
    }

    let mut rng = Rng::for_component(params.seed, "synth/utility");
    let utility: Vec<u32> = private
        .iter()
        .map(|&p| {
            if rng.bernoulli(params.rho) {
                (p - 1) % mu as u32 + 1
            } else {
                rng.below(mu) as u32 + 1
            }
        })
        .collect();

    let mut rng = Rng::for_component(params.seed, "synth/feature");
    let feature: Vec<u32> = utility
        .iter()
        .map(|&u| {
            if rng.bernoulli(params.flip) {
                // uniform over the other classes
                let other = rng.below(mu - 1) as u32 + 1;
                if other >= u {
                    other + 1
                } else {
                    other
                }
            } else {
                u
            }
        })
        .collect();

    let schema = params.schema();
    let g = Graph::new(n, edges, &schema, vec![private, utility, feature])?;
    Ok((g, schema))
}
