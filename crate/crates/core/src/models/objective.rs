//! Composite objectives: the obfuscator (reconstruction minus weighted
//! attacker loss), the discriminator, the generator and the attacker.

use crate::error::{Error, Result};
use crate::graphcore::Labels;
use crate::numkit::{DenseMatrix, Rng, SparseMatrix};

use super::{
    attacker_loss, attr_loss, concat_privacy, expand, link_loss, recon_loss, EncoderCache,
    LinkLoss, LinkTargets, ModelState,
};

/// Everything the losses read from the graph, fixed for a training run.
#[derive(Clone, Debug)]
pub struct GraphInputs {
    pub laplacian: SparseMatrix,
    /// `L·X`, shared by every encoder pass.
    pub propagated: DenseMatrix,
    pub links: LinkTargets,
    pub utilities: Vec<Labels>,
    pub privacy: Labels,
}

impl GraphInputs {
    pub fn new(
        laplacian: SparseMatrix,
        features: &DenseMatrix,
        links: LinkTargets,
        utilities: Vec<Labels>,
        privacy: Labels,
    ) -> Result<Self> {
        let n = laplacian.rows();
        if features.rows() != n || links.node_count() != n || privacy.onehot.rows() != n {
            return Err(Error::shape(
                "GraphInputs",
                laplacian.shape(),
                features.shape(),
            ));
        }
        if utilities.iter().any(|u| u.onehot.rows() != n) {
            return Err(Error::Input(
                "utility labels disagree with node count".into(),
            ));
        }
        let propagated = laplacian.spmm(features)?;
        Ok(GraphInputs {
            laplacian,
            propagated,
            links,
            utilities,
            privacy,
        })
    }

    pub fn node_count(&self) -> usize {
        self.laplacian.rows()
    }
}

/// One forward pass through encoder, expansion and privacy concatenation.
#[derive(Clone, Debug)]
pub struct ForwardCache {
    pub encoder: EncoderCache,
    /// Released embedding Z.
    pub release: DenseMatrix,
    /// Decoder input: Z⁺ for privacy-aware variants, otherwise Z.
    pub decoder_input: DenseMatrix,
}

impl ForwardCache {
    /// Compressed code Z′ (the encoder output).
    pub fn code(&self) -> &DenseMatrix {
        &self.encoder.code
    }
}

impl ModelState {
    pub fn forward(&self, inputs: &GraphInputs) -> Result<ForwardCache> {
        let encoder = self
            .encoder
            .forward(&inputs.laplacian, &inputs.propagated)?;
        let release = match &self.expansion {
            Some(we) => expand(&encoder.code, we)?,
            None => encoder.code.clone(),
        };
        let decoder_input = if self.variant.privacy_to_decoder() {
            concat_privacy(&release, &inputs.privacy.onehot)?
        } else {
            release.clone()
        };
        Ok(ForwardCache {
            encoder,
            release,
            decoder_input,
        })
    }

    /// Released embedding only.
    pub fn embed(&self, inputs: &GraphInputs) -> Result<DenseMatrix> {
        Ok(self.forward(inputs)?.release)
    }

    /// Back-propagates a release-embedding cotangent into `[dW0, dW1, dWe?]`.
    fn backward_release(
        &self,
        inputs: &GraphInputs,
        cache: ForwardCache,
        d_release: &DenseMatrix,
    ) -> Result<Vec<DenseMatrix>> {
        let (d_code, d_we) = match &self.expansion {
            Some(we) => (
                d_release.matmul_nt(we)?,
                Some(cache.encoder.code.matmul_tn(d_release)?),
            ),
            None => (d_release.clone(), None),
        };
        let mut grads = self.encoder.backward(
            &inputs.laplacian,
            &inputs.propagated,
            cache.encoder,
            &d_code,
        )?;
        grads.extend(d_we);
        Ok(grads)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObfuscatorLosses {
    pub link: f64,
    /// One entry per utility attribute.
    pub attrs: Vec<f64>,
    /// Training attacker's loss; 0 when the variant has no attacker.
    pub attack: f64,
    pub recon: f64,
    pub obf: f64,
}

impl ObfuscatorLosses {
    pub fn attr_total(&self) -> f64 {
        self.attrs.iter().sum()
    }
}

/// `L_recon − λ·L_att`.
pub fn obf_loss(recon: f64, attack: f64, lambda: f64) -> f64 {
    recon - lambda * attack
}

/// Obfuscator loss and gradients in [`super::ParamGroup::Obfuscator`] order.
///
/// `lambda` is ignored for variants without an attacker; the attacker's own
/// parameters are treated as constants.
pub fn obfuscator(
    state: &ModelState,
    inputs: &GraphInputs,
    lambda: f64,
    mode: LinkLoss,
    rng: &mut Rng,
) -> Result<(ObfuscatorLosses, Vec<DenseMatrix>)> {
    if lambda < 0.0 {
        return Err(Error::Config(format!("lambda must be >= 0, got {lambda}")));
    }
    let cache = state.forward(inputs)?;
    let zin = &cache.decoder_input;
    let (link, mut d_zin) = link_loss(zin, &inputs.links, mode, rng)?;

    let mut attrs = Vec::with_capacity(state.heads.len());
    let mut head_grads = Vec::with_capacity(state.heads.len());
    for (wc, labels) in state.heads.iter().zip(&inputs.utilities) {
        let (l, g) = attr_loss(zin, wc, labels)?;
        d_zin.axpy(1.0, &g.input)?;
        attrs.push(l);
        head_grads.push(g.w);
    }
    let recon = recon_loss(link, &attrs);

    let width = cache.release.cols();
    let mut d_release = if d_zin.cols() == width {
        d_zin
    } else {
        d_zin.columns(0, width)
    };

    let mut attack = 0.0;
    let mut weight = 0.0;
    if let Some(att) = &state.attacker {
        let (l, g) = attacker_loss(att, &cache.release, &inputs.privacy)?;
        attack = l;
        weight = lambda;
        if lambda != 0.0 {
            d_release.axpy(-lambda, &g.z)?;
        }
    }

    let mut grads = state.backward_release(inputs, cache, &d_release)?;
    grads.extend(head_grads);
    Ok((
        ObfuscatorLosses {
            link,
            attrs,
            attack,
            recon,
            obf: obf_loss(recon, attack, weight),
        },
        grads,
    ))
}

/// Discriminator loss on prior samples vs the current code, with gradients
/// in [`super::ParamGroup::Discriminator`] order.
pub fn discriminator(
    state: &ModelState,
    inputs: &GraphInputs,
    prior: &DenseMatrix,
) -> Result<(f64, Vec<DenseMatrix>)> {
    let disc = state
        .discriminator
        .as_ref()
        .ok_or_else(|| Error::Config(format!("{} has no discriminator", state.variant)))?;
    let code = state
        .encoder
        .forward(&inputs.laplacian, &inputs.propagated)?
        .code;
    disc.disc_loss(prior, &code)
}

/// Generator loss `mean[−log D(z′)]` with encoder gradients `[dW0, dW1]`.
pub fn generator(state: &ModelState, inputs: &GraphInputs) -> Result<(f64, Vec<DenseMatrix>)> {
    let disc = state
        .discriminator
        .as_ref()
        .ok_or_else(|| Error::Config(format!("{} has no discriminator", state.variant)))?;
    let cache = state
        .encoder
        .forward(&inputs.laplacian, &inputs.propagated)?;
    let (loss, d_code) = disc.gen_fool_loss(&cache.code)?;
    let grads = state
        .encoder
        .backward(&inputs.laplacian, &inputs.propagated, cache, &d_code)?;
    Ok((loss, grads))
}

/// Attacker loss on the current release embedding, gradients `[dWa, dba]`.
pub fn attacker(state: &ModelState, inputs: &GraphInputs) -> Result<(f64, Vec<DenseMatrix>)> {
    let att = state
        .attacker
        .as_ref()
        .ok_or_else(|| Error::Config(format!("{} has no attacker", state.variant)))?;
    let z = state.embed(inputs)?;
    let (loss, g) = attacker_loss(att, &z, &inputs.privacy)?;
    Ok((loss, vec![g.w, g.b]))
}
