use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{glorot_init, DenseMatrix, Rng};

use super::{Attacker, Discriminator, Encoder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "GAE")]
    Gae,
    #[serde(rename = "GAE_RM")]
    GaeRm,
    #[serde(rename = "APDGE")]
    Apdge,
    #[serde(rename = "APPGE")]
    Appge,
    #[serde(rename = "APGE")]
    Apge,
    #[serde(rename = "APGE_NOEXP")]
    ApgeNoExp,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Gae,
        Variant::GaeRm,
        Variant::Apdge,
        Variant::Appge,
        Variant::Apge,
        Variant::ApgeNoExp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Gae => "GAE",
            Variant::GaeRm => "GAE_RM",
            Variant::Apdge => "APDGE",
            Variant::Appge => "APPGE",
            Variant::Apge => "APGE",
            Variant::ApgeNoExp => "APGE_NOEXP",
        }
    }

    /// Encoder emits a compressed code of width d′.
    pub fn compressed(self) -> bool {
        matches!(self, Variant::Apdge | Variant::Apge | Variant::ApgeNoExp)
    }

    pub fn has_expansion(self) -> bool {
        matches!(self, Variant::Apdge | Variant::Apge)
    }

    pub fn has_discriminator(self) -> bool {
        self.compressed()
    }

    pub fn has_attacker(self) -> bool {
        matches!(self, Variant::Appge | Variant::Apge | Variant::ApgeNoExp)
    }

    /// Decoder sees the private one-hot appended to the release embedding.
    pub fn privacy_to_decoder(self) -> bool {
        self.compressed()
    }

    pub fn drops_private_features(self) -> bool {
        self == Variant::GaeRm
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown variant {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDims {
    /// Input feature width P.
    pub features: usize,
    pub hidden: usize,
    /// d′, used by compressed variants.
    pub code: usize,
    /// d, the released embedding width.
    pub release: usize,
    pub utility_classes: Vec<usize>,
    pub private_classes: usize,
}

impl ModelDims {
    pub fn encoder_out(&self, v: Variant) -> usize {
        if v.compressed() {
            self.code
        } else {
            self.release
        }
    }

    pub fn release_width(&self, v: Variant) -> usize {
        if v.compressed() && !v.has_expansion() {
            self.code
        } else {
            self.release
        }
    }

    pub fn decoder_width(&self, v: Variant) -> usize {
        self.release_width(v)
            + if v.privacy_to_decoder() {
                self.private_classes
            } else {
                0
            }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamGroup {
    /// Encoder, expansion and utility heads.
    Obfuscator,
    Encoder,
    Discriminator,
    Attacker,
}

/// Trainable parameters of one variant.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelState {
    pub variant: Variant,
    pub encoder: Encoder,
    pub expansion: Option<DenseMatrix>,
    pub heads: Vec<DenseMatrix>,
    pub discriminator: Option<Discriminator>,
    pub attacker: Option<Attacker>,
}

impl ModelState {
    pub fn init(variant: Variant, dims: &ModelDims, rng: &mut Rng) -> Result<Self> {
        let code_w = dims.encoder_out(variant);
        let encoder = Encoder {
            w0: glorot_init(dims.features, dims.hidden, rng)?,
            w1: glorot_init(dims.hidden, code_w, rng)?,
        };
        let expansion = if variant.has_expansion() {
            if dims.release < dims.code {
                return Err(Error::Config(format!(
                    "release dimension {} must be >= code dimension {}",
                    dims.release, dims.code
                )));
            }
            Some(glorot_init(dims.code, dims.release, rng)?)
        } else {
            None
        };
        let dec = dims.decoder_width(variant);
        let heads = dims
            .utility_classes
            .iter()
            .map(|&m| glorot_init(dec, m, rng))
            .collect::<Result<_>>()?;
        let discriminator = if variant.has_discriminator() {
            Some(Discriminator::init(code_w, rng)?)
        } else {
            None
        };
        let attacker = if variant.has_attacker() {
            Some(Attacker::init(
                dims.release_width(variant),
                dims.private_classes,
                rng,
            )?)
        } else {
            None
        };
        ModelState::from_parts(variant, encoder, expansion, heads, discriminator, attacker)
    }

    /// Assembles a state, rejecting blocks the variant does not use.
    pub fn from_parts(
        variant: Variant,
        encoder: Encoder,
        expansion: Option<DenseMatrix>,
        heads: Vec<DenseMatrix>,
        discriminator: Option<Discriminator>,
        attacker: Option<Attacker>,
    ) -> Result<Self> {
        let check = |present: bool, wanted: bool, block: &str| {
            if present != wanted {
                Err(Error::Config(format!(
                    "{variant} {} a{} {block} block",
                    if wanted { "requires" } else { "must not have" },
                    if block.starts_with(['a', 'e']) {
                        "n"
                    } else {
                        ""
                    }
                )))
            } else {
                Ok(())
            }
        };
        check(expansion.is_some(), variant.has_expansion(), "expansion")?;
        check(
            discriminator.is_some(),
            variant.has_discriminator(),
            "discriminator",
        )?;
        check(attacker.is_some(), variant.has_attacker(), "attacker")?;

        let code_w = encoder.w1.cols();
        if encoder.w0.cols() != encoder.w1.rows() {
            return Err(Error::shape(
                "encoder",
                encoder.w0.shape(),
                encoder.w1.shape(),
            ));
        }
        let release_w = match &expansion {
            Some(we) if we.rows() != code_w => {
                return Err(Error::shape("expansion", (code_w, 0), we.shape()))
            }
            Some(we) => we.cols(),
            None => code_w,
        };
        if let Some(d) = &discriminator {
            if d.w1.rows() != code_w {
                return Err(Error::shape("discriminator", (code_w, 0), d.w1.shape()));
            }
        }
        let private_w = match &attacker {
            Some(a) if a.w.rows() != release_w => {
                return Err(Error::shape("attacker", (release_w, 0), a.w.shape()))
            }
            Some(a) => a.w.cols(),
            None => 0,
        };
        if variant.privacy_to_decoder() {
            if let Some(h) = heads.iter().find(|h| h.rows() <= release_w) {
                return Err(Error::shape("head", (release_w, 0), h.shape()));
            }
            if private_w > 0 && heads.iter().any(|h| h.rows() != release_w + private_w) {
                return Err(Error::Config(
                    "utility heads disagree with privacy width".into(),
                ));
            }
        } else if let Some(h) = heads.iter().find(|h| h.rows() != release_w) {
            return Err(Error::shape("head", (release_w, 0), h.shape()));
        }
        Ok(ModelState {
            variant,
            encoder,
            expansion,
            heads,
            discriminator,
            attacker,
        })
    }

    pub fn params(&self, group: ParamGroup) -> Vec<&DenseMatrix> {
        match group {
            ParamGroup::Encoder => vec![&self.encoder.w0, &self.encoder.w1],
            ParamGroup::Obfuscator => {
                let mut v = vec![&self.encoder.w0, &self.encoder.w1];
                v.extend(self.expansion.as_ref());
                v.extend(self.heads.iter());
                v
            }
            ParamGroup::Discriminator => self
                .discriminator
                .as_ref()
                .map_or_else(Vec::new, |d| vec![&d.w1, &d.b1, &d.w2, &d.b2]),
            ParamGroup::Attacker => self
                .attacker
                .as_ref()
                .map_or_else(Vec::new, |a| vec![&a.w, &a.b]),
        }
    }

    pub fn params_mut(&mut self, group: ParamGroup) -> Vec<&mut DenseMatrix> {
        match group {
            ParamGroup::Encoder => vec![&mut self.encoder.w0, &mut self.encoder.w1],
            ParamGroup::Obfuscator => {
                let mut v = vec![&mut self.encoder.w0, &mut self.encoder.w1];
                v.extend(self.expansion.as_mut());
                v.extend(self.heads.iter_mut());
                v
            }
            ParamGroup::Discriminator => self.discriminator.as_mut().map_or_else(Vec::new, |d| {
                vec![&mut d.w1, &mut d.b1, &mut d.w2, &mut d.b2]
            }),
            ParamGroup::Attacker => self
                .attacker
                .as_mut()
                .map_or_else(Vec::new, |a| vec![&mut a.w, &mut a.b]),
        }
    }

    /// Parameters of `group` flattened in order.
    pub fn flatten(&self, group: ParamGroup) -> Vec<f64> {
        self.params(group)
            .into_iter()
            .flat_map(|m| m.data().iter().copied())
            .collect()
    }

    /// Overwrites `group` from a flat vector produced by [`Self::flatten`].
    pub fn unflatten(&mut self, group: ParamGroup, flat: &[f64]) {
        let mut offset = 0;
        for m in self.params_mut(group) {
            let len = m.data().len();
            m.data_mut().copy_from_slice(&flat[offset..offset + len]);
            offset += len;
        }
        assert_eq!(offset, flat.len(), "flat parameter length mismatch");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims() -> ModelDims {
        ModelDims {
            features: 5,
            hidden: 4,
            code: 2,
            release: 6,
            utility_classes: vec![3],
            private_classes: 2,
        }
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("VGAE".parse::<Variant>().is_err());
        assert_eq!(Variant::GaeRm.to_string(), "GAE_RM");
    }

    #[test]
    fn blocks_follow_variant() {
        let mut rng = Rng::new(1);
        for v in Variant::ALL {
            let s = ModelState::init(v, &dims(), &mut rng).unwrap();
            assert_eq!(s.expansion.is_some(), v.has_expansion(), "{v}");
            assert_eq!(s.discriminator.is_some(), v.has_discriminator(), "{v}");
            assert_eq!(s.attacker.is_some(), v.has_attacker(), "{v}");
            assert_eq!(s.heads[0].rows(), dims().decoder_width(v));
        }
        let gae = ModelState::init(Variant::Gae, &dims(), &mut rng).unwrap();
        assert!(gae.discriminator.is_none() && gae.attacker.is_none() && gae.expansion.is_none());
    }

    #[test]
    fn gae_with_adversarial_blocks_is_rejected() {
        let mut rng = Rng::new(2);
        let apge = ModelState::init(Variant::Apge, &dims(), &mut rng).unwrap();
        let gae = ModelState::init(Variant::Gae, &dims(), &mut rng).unwrap();
        let err = ModelState::from_parts(
            Variant::Gae,
            gae.encoder.clone(),
            None,
            gae.heads.clone(),
            apge.discriminator.clone(),
            None,
        );
        assert!(matches!(err, Err(Error::Config(_))));
        let err = ModelState::from_parts(
            Variant::GaeRm,
            gae.encoder.clone(),
            apge.expansion.clone(),
            gae.heads.clone(),
            None,
            None,
        );
        assert!(err.is_err());
    }

    #[test]
    fn flatten_round_trip() {
        let mut s = ModelState::init(Variant::Apge, &dims(), &mut Rng::new(3)).unwrap();
        for g in [
            ParamGroup::Obfuscator,
            ParamGroup::Discriminator,
            ParamGroup::Attacker,
        ] {
            let flat = s.flatten(g);
            let bumped: Vec<f64> = flat.iter().map(|v| v + 1.0).collect();
            s.unflatten(g, &bumped);
            assert_eq!(s.flatten(g), bumped);
        }
    }
}
