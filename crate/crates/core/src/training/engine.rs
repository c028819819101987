use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphcore::{
    build_features, normalize_adjacency, onehot_labels, split_edges, AttributeSchema, EdgeSplit,
    Graph,
};
use crate::models::{objective, GraphInputs, LinkTargets, ModelDims, ModelState, ParamGroup};
use crate::numkit::{derive_seed, randn, AdamConfig, AdamState, DenseMatrix, Rng};

use super::TrainConfig;

/// Losses recorded after each iteration; components a variant lacks are 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub l_link: f64,
    pub l_attr: f64,
    pub l_att: f64,
    pub l_dc: f64,
    pub l_obf: f64,
}

#[derive(Clone, Debug)]
pub struct EmbeddingResult {
    /// Released embedding, n × release width.
    pub z: DenseMatrix,
    /// Encoder output Z′ (equal to `z` for uncompressed variants).
    pub code: DenseMatrix,
    pub trace: Vec<TraceRow>,
    pub config: TrainConfig,
    pub state: ModelState,
    pub edge_split: Option<EdgeSplit>,
    pub wall_time: Duration,
}

/// Edge split used by training, reproducible from the config alone.
pub fn edge_split_for(g: &Graph, cfg: &TrainConfig) -> Result<Option<EdgeSplit>> {
    if cfg.edge_holdout == 0.0 {
        return Ok(None);
    }
    split_edges(g, cfg.edge_holdout, derive_seed(cfg.seed, "edge-split")).map(Some)
}

/// Loss inputs and model dimensions for one configuration.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub inputs: GraphInputs,
    pub dims: ModelDims,
    pub edge_split: Option<EdgeSplit>,
}

pub fn prepare(g: &Graph, schema: &AttributeSchema, cfg: &TrainConfig) -> Result<Prepared> {
    cfg.validate()?;
    let n = g.node_count();
    let edge_split = edge_split_for(g, cfg)?;
    let edges = edge_split.as_ref().map_or(g.edges(), |s| &s.train[..]);
    let laplacian = normalize_adjacency(g, edges)?;
    let links = LinkTargets::from_edges(n, edges);

    let private = schema.private().name.clone();
    let exclude: Vec<&str> = if cfg.variant.drops_private_features() {
        vec![private.as_str()]
    } else {
        Vec::new()
    };
    let mut features = build_features(g, schema, &exclude)?;
    if cfg.standardize_features {
        standardize_columns(&mut features);
    }
    let utilities: Vec<_> = schema
        .utilities()
        .map(|u| onehot_labels(g, schema, &u.name))
        .collect::<Result<_>>()?;
    let privacy = onehot_labels(g, schema, &private)?;
    let dims = ModelDims {
        features: features.cols(),
        hidden: cfg.hidden,
        code: cfg.d_prime,
        release: cfg.d,
        utility_classes: utilities.iter().map(|u| u.num_classes()).collect(),
        private_classes: privacy.num_classes(),
    };
    let inputs = GraphInputs::new(laplacian, &features, links, utilities, privacy)?;
    Ok(Prepared {
        inputs,
        dims,
        edge_split,
    })
}

fn standardize_columns(x: &mut DenseMatrix) {
    let n = x.rows() as f64;
    for j in 0..x.cols() {
        let mean = (0..x.rows()).map(|i| x.get(i, j)).sum::<f64>() / n;
        let var = (0..x.rows())
            .map(|i| (x.get(i, j) - mean).powi(2))
            .sum::<f64>()
            / n;
        let scale = if var > 1e-24 { var.sqrt().recip() } else { 1.0 };
        for i in 0..x.rows() {
            let v = (x.get(i, j) - mean) * scale;
            x.set(i, j, v);
        }
    }
}

fn finite(value: f64, component: &'static str, iteration: usize) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Diverged {
            component,
            iteration,
        })
    }
}

fn step(
    adam: &mut AdamState,
    state: &mut ModelState,
    group: ParamGroup,
    grads: &[DenseMatrix],
    component: &'static str,
    iteration: usize,
) -> Result<()> {
    if grads.iter().any(|g| !g.is_finite()) {
        return Err(Error::Diverged {
            component,
            iteration,
        });
    }
    adam.step(&mut state.params_mut(group), grads)
}

/// Runs `cfg.iterations` rounds of the variant's schedule.
pub fn train(g: &Graph, schema: &AttributeSchema, cfg: &TrainConfig) -> Result<EmbeddingResult> {
    let started = Instant::now();
    let Prepared {
        inputs,
        dims,
        edge_split,
    } = prepare(g, schema, cfg)?;
    let n = inputs.node_count();
    let variant = cfg.variant;
    let mode = cfg.link_loss_for(n);
    let lambda = if variant.has_attacker() {
        cfg.lambda
    } else {
        0.0
    };

    let mut state = ModelState::init(variant, &dims, &mut Rng::for_component(cfg.seed, "init"))?;
    if let Some(att) = state.attacker.as_mut() {
        att.standardize = cfg.attacker_standardize;
    }
    let mut prior_rng = Rng::for_component(cfg.seed, "prior");
    let mut link_rng = Rng::for_component(cfg.seed, "link-neg");

    let main = AdamConfig::with_lr(cfg.lr);
    let mut adam_obf = AdamState::new(main, &state.params(ParamGroup::Obfuscator));
    let mut adam_gen = AdamState::new(main, &state.params(ParamGroup::Encoder));
    let mut adam_dis = AdamState::new(
        AdamConfig::with_lr(cfg.disc_lr),
        &state.params(ParamGroup::Discriminator),
    );
    let mut adam_att = AdamState::new(
        AdamConfig::with_lr(cfg.att_lr),
        &state.params(ParamGroup::Attacker),
    );

    let mut trace = Vec::with_capacity(cfg.iterations);
    for it in 0..cfg.iterations {
        if variant.has_attacker() {
            for _ in 0..cfg.k_att {
                let (l, grads) = objective::attacker(&state, &inputs)?;
                finite(l, "attacker", it)?;
                step(
                    &mut adam_att,
                    &mut state,
                    ParamGroup::Attacker,
                    &grads,
                    "attacker",
                    it,
                )?;
            }
        }

        let (losses, grads) = objective::obfuscator(&state, &inputs, lambda, mode, &mut link_rng)?;
        finite(losses.link, "link", it)?;
        finite(losses.attr_total(), "attribute", it)?;
        finite(losses.obf, "obfuscator", it)?;
        step(
            &mut adam_obf,
            &mut state,
            ParamGroup::Obfuscator,
            &grads,
            "obfuscator",
            it,
        )?;

        let mut l_dc = 0.0;
        if variant.has_discriminator() {
            for _ in 0..cfg.k_dis {
                let prior = randn(n, dims.code, &mut prior_rng)?;
                let (l, grads) = objective::discriminator(&state, &inputs, &prior)?;
                l_dc = finite(l, "discriminator", it)?;
                step(
                    &mut adam_dis,
                    &mut state,
                    ParamGroup::Discriminator,
                    &grads,
                    "discriminator",
                    it,
                )?;
            }
            let (l, grads) = objective::generator(&state, &inputs)?;
            finite(l, "generator", it)?;
            step(
                &mut adam_gen,
                &mut state,
                ParamGroup::Encoder,
                &grads,
                "generator",
                it,
            )?;
        }

        trace.push(TraceRow {
            iter: it,
            l_link: losses.link,
            l_attr: losses.attr_total(),
            l_att: losses.attack,
            l_dc,
            l_obf: losses.obf,
        });
    }

    let cache = state.forward(&inputs)?;
    if !cache.release.is_finite() {
        return Err(Error::Diverged {
            component: "embedding",
            iteration: cfg.iterations,
        });
    }
    Ok(EmbeddingResult {
        code: cache.encoder.code,
        z: cache.release,
        trace,
        config: cfg.clone(),
        state,
        edge_split,
        wall_time: started.elapsed(),
    })
}
