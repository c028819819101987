//! Network blocks and losses for the five embedding variants plus the
//! expansion-free ablation.
//!
//! Every block carries its own hand-written backward pass; the composite
//! objectives in [`objective`] chain them into per-group gradients that the
//! training loop feeds to Adam.

mod attacker;
mod decoder;
mod discriminator;
mod encoder;
mod heads;
pub mod objective;
mod state;

pub use attacker::{attacker_forward, attacker_loss, Attacker, AttackerGrads};
pub use decoder::{decode_links, link_loss, LinkLoss, LinkTargets};
pub use discriminator::{Discriminator, DISC_HIDDEN};
pub use encoder::{concat_privacy, expand, gcn_encode, Encoder, EncoderCache};
pub use heads::{attr_loss, recon_loss, HeadGrads};
pub use objective::{obf_loss, ForwardCache, GraphInputs, ObfuscatorLosses};
pub use state::{ModelDims, ModelState, ParamGroup, Variant};
