//! Registry of finite-difference checks over every kernel and composite
//! loss, evaluated on a 12-node synthetic graph.

use crate::datagen::{synth_graph, SynthParams, PRIVATE};
use crate::error::Result;
use crate::graphcore::{build_features, normalize_adjacency, onehot_labels};
use crate::models::{
    attacker_loss, attr_loss, link_loss, objective, GraphInputs, LinkLoss, LinkTargets, ModelDims,
    ModelState, ParamGroup, Variant,
};
use crate::numkit::{
    bce_with_logits, glorot_init, grad_check, randn, relu, relu_backward, softmax_cross_entropy,
    standardize_columns,
    DenseMatrix, GradCheck, Rng,
};

pub const TOLERANCE: f64 = 1e-4;
pub const STEP: f64 = 1e-5;

pub struct NamedCheck {
    pub name: String,
    run: Box<dyn Fn() -> Result<GradCheck>>,
}

impl NamedCheck {
    pub fn new(name: impl Into<String>, run: impl Fn() -> Result<GradCheck> + 'static) -> Self {
        NamedCheck {
            name: name.into(),
            run: Box::new(run),
        }
    }

    pub fn run(&self) -> Result<GradCheck> {
        (self.run)()
    }
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: String,
    pub result: GradCheck,
    pub passed: bool,
}

pub fn run_checks(checks: &[NamedCheck], tol: f64) -> Result<Vec<CheckOutcome>> {
    checks
        .iter()
        .map(|c| {
            let result = c.run()?;
            Ok(CheckOutcome {
                name: c.name.clone(),
                passed: result.passes(tol),
                result,
            })
        })
        .collect()
}

/// Small fixture: graph inputs plus the dimensions used for every model check.
#[derive(Clone)]
pub struct Fixture {
    pub inputs: GraphInputs,
    pub inputs_without_private: GraphInputs,
    pub dims: ModelDims,
    pub dims_without_private: ModelDims,
}

impl Fixture {
    pub fn new(seed: u64) -> Result<Self> {
        let params = SynthParams {
            n: 12,
            private_classes: 2,
            utility_classes: 3,
            p_in: 0.5,
            p_out: 0.1,
            rho: 0.3,
            flip: 0.2,
            seed,
        };
        let (g, schema) = synth_graph(&params)?;
        let l = normalize_adjacency(&g, g.edges())?;
        let links = LinkTargets::from_edges(g.node_count(), g.edges());
        let utilities: Vec<_> = schema
            .utilities()
            .map(|u| onehot_labels(&g, &schema, &u.name))
            .collect::<Result<_>>()?;
        let privacy = onehot_labels(&g, &schema, PRIVATE)?;
        let full = build_features(&g, &schema, &[])?;
        let reduced = build_features(&g, &schema, &[PRIVATE])?;
        let dims = |features: usize| ModelDims {
            features,
            hidden: 6,
            code: 3,
            release: 5,
            utility_classes: vec![3],
            private_classes: 2,
        };
        Ok(Fixture {
            inputs: GraphInputs::new(
                l.clone(),
                &full,
                links.clone(),
                utilities.clone(),
                privacy.clone(),
            )?,
            inputs_without_private: GraphInputs::new(l, &reduced, links, utilities, privacy)?,
            dims: dims(full.cols()),
            dims_without_private: dims(reduced.cols()),
        })
    }

    pub fn for_variant(&self, v: Variant) -> (&GraphInputs, &ModelDims) {
        if v.drops_private_features() {
            (&self.inputs_without_private, &self.dims_without_private)
        } else {
            (&self.inputs, &self.dims)
        }
    }
}

fn group_check<F>(state: ModelState, group: ParamGroup, f: F) -> GradCheck
where
    F: Fn(&ModelState) -> (f64, Vec<DenseMatrix>),
{
    let x = state.flatten(group);
    grad_check(
        |flat| {
            let mut s = state.clone();
            s.unflatten(group, flat);
            let (loss, grads) = f(&s);
            (
                loss,
                grads.into_iter().flat_map(DenseMatrix::into_data).collect(),
            )
        },
        &x,
        STEP,
    )
}

fn matrix_check<F>(m: &DenseMatrix, f: F) -> GradCheck
where
    F: Fn(&DenseMatrix) -> (f64, DenseMatrix),
{
    let (r, c) = m.shape();
    grad_check(
        |flat| {
            let (l, g) = f(&DenseMatrix::new(r, c, flat.to_vec()).unwrap());
            (l, g.into_data())
        },
        m.data(),
        STEP,
    )
}

/// Every registered check, kernels first.
pub fn registered_checks() -> Result<Vec<NamedCheck>> {
    let fx = Fixture::new(2024)?;
    let n = fx.inputs.node_count();
    let mut checks = Vec::new();

    checks.push(NamedCheck::new("kernel/relu", || {
        let mut rng = Rng::new(1);
        let x = randn(4, 5, &mut rng)?.map(|v| if v.abs() < 0.05 { v + 0.1 } else { v });
        let w = randn(4, 5, &mut rng)?;
        Ok(matrix_check(&x, |m| {
            let f = relu(m).hadamard(&w).unwrap().sum();
            (f, relu_backward(&w, m).unwrap())
        }))
    }));
    checks.push(NamedCheck::new("kernel/bce_with_logits", || {
        let mut rng = Rng::new(2);
        let x = randn(4, 4, &mut rng)?.scale(3.0);
        let t = DenseMatrix::new(
            4,
            4,
            (0..16).map(|_| rng.bernoulli(0.4) as u8 as f64).collect(),
        )?;
        Ok(matrix_check(&x, |m| bce_with_logits(m, &t, 2.5).unwrap()))
    }));
    checks.push(NamedCheck::new("kernel/softmax_cross_entropy", || {
        let mut rng = Rng::new(3);
        let x = randn(5, 3, &mut rng)?;
        let mut y = DenseMatrix::zeros(5, 3);
        for i in 0..5 {
            y.set(i, rng.below(3), 1.0);
        }
        Ok(matrix_check(&x, |m| {
            softmax_cross_entropy(m, &y, &[0, 2, 3, 4]).unwrap()
        }))
    }));
    checks.push(NamedCheck::new("kernel/standardize_columns", || {
        let mut rng = Rng::new(5);
        let x = randn(6, 3, &mut rng)?.scale(2.0);
        let w = randn(6, 3, &mut rng)?;
        Ok(matrix_check(&x, |m| {
            let s = standardize_columns(m, 1e-8);
            let f = s.output.hadamard(&w).unwrap().sum();
            (f, s.backward(&w).unwrap())
        }))
    }));
    {
        let fx = fx.clone();
        checks.push(NamedCheck::new("kernel/gcn_encoder", move || {
            let mut rng = Rng::new(4);
            let state = ModelState::init(Variant::Gae, &fx.dims, &mut rng)?;
            let probe = randn(n, fx.dims.release, &mut rng)?;
            let inp = fx.inputs.clone();
            Ok(group_check(state, ParamGroup::Encoder, move |s| {
                let cache = s.encoder.forward(&inp.laplacian, &inp.propagated).unwrap();
                let f = cache.code.hadamard(&probe).unwrap().sum();
                let g = s
                    .encoder
                    .backward(&inp.laplacian, &inp.propagated, cache, &probe)
                    .unwrap();
                (f, g)
            }))
        }));
    }
    for (name, mode) in [
        ("loss/link_exact", LinkLoss::Exact),
        (
            "loss/link_sampled_all_negatives",
            LinkLoss::Sampled {
                negatives_per_positive: n * n,
            },
        ),
        (
            "loss/link_sampled",
            LinkLoss::Sampled {
                negatives_per_positive: 2,
            },
        ),
    ] {
        let links = fx.inputs.links.clone();
        checks.push(NamedCheck::new(name, move || {
            let z = randn(n, 4, &mut Rng::new(5))?.scale(0.7);
            Ok(matrix_check(&z, |m| {
                link_loss(m, &links, mode, &mut Rng::new(99)).unwrap()
            }))
        }));
    }
    {
        let labels = fx.inputs.utilities[0].clone();
        checks.push(NamedCheck::new("loss/attr_wrt_head", move || {
            let mut rng = Rng::new(6);
            let z = randn(n, 4, &mut rng)?;
            let w = glorot_init(4, 3, &mut rng)?;
            Ok(matrix_check(&w, |m| {
                let (l, g) = attr_loss(&z, m, &labels).unwrap();
                (l, g.w)
            }))
        }));
        let labels = fx.inputs.utilities[0].clone();
        checks.push(NamedCheck::new("loss/attr_wrt_input", move || {
            let mut rng = Rng::new(7);
            let z = randn(n, 4, &mut rng)?;
            let w = glorot_init(4, 3, &mut rng)?;
            Ok(matrix_check(&z, |m| {
                let (l, g) = attr_loss(m, &w, &labels).unwrap();
                (l, g.input)
            }))
        }));
    }
    {
        let fx = fx.clone();
        checks.push(NamedCheck::new("loss/recon_GAE", move || {
            let state = ModelState::init(Variant::Gae, &fx.dims, &mut Rng::new(8))?;
            let inp = fx.inputs.clone();
            Ok(group_check(state, ParamGroup::Obfuscator, move |s| {
                let (l, g) =
                    objective::obfuscator(s, &inp, 0.0, LinkLoss::Exact, &mut Rng::new(0)).unwrap();
                (l.recon, g)
            }))
        }));
    }
    for variant in [Variant::Apdge, Variant::Apge, Variant::ApgeNoExp] {
        let fx1 = fx.clone();
        checks.push(NamedCheck::new(
            format!("loss/disc_params_{variant}"),
            move || {
                let fx = &fx1;
                let mut rng = Rng::new(9);
                let state = ModelState::init(variant, &fx.dims, &mut rng)?;
                let prior = randn(n, fx.dims.code, &mut rng)?;
                let inp = fx.inputs.clone();
                Ok(group_check(state, ParamGroup::Discriminator, move |s| {
                    objective::discriminator(s, &inp, &prior).unwrap()
                }))
            },
        ));
        let fx = fx.clone();
        checks.push(NamedCheck::new(
            format!("loss/generator_encoder_{variant}"),
            move || {
                let state = ModelState::init(variant, &fx.dims, &mut Rng::new(10))?;
                let inp = fx.inputs.clone();
                Ok(group_check(state, ParamGroup::Encoder, move |s| {
                    objective::generator(s, &inp).unwrap()
                }))
            },
        ));
    }
    for variant in [Variant::Appge, Variant::Apge, Variant::ApgeNoExp] {
        let fx = fx.clone();
        checks.push(NamedCheck::new(
            format!("loss/attacker_params_{variant}"),
            move || {
                let state = ModelState::init(variant, &fx.dims, &mut Rng::new(11))?;
                let inp = fx.inputs.clone();
                Ok(group_check(state, ParamGroup::Attacker, move |s| {
                    objective::attacker(s, &inp).unwrap()
                }))
            },
        ));
    }
    for (name, standardize) in [
        ("loss/attacker_wrt_embedding", false),
        ("loss/attacker_wrt_embedding_standardized", true),
    ] {
        let privacy = fx.inputs.privacy.clone();
        let fx = fx.clone();
        checks.push(NamedCheck::new(name, move || {
            let mut rng = Rng::new(12);
            let state = ModelState::init(Variant::Apge, &fx.dims, &mut rng)?;
            let mut att = state.attacker.clone().unwrap();
            att.standardize = standardize;
            let z = randn(n, fx.dims.release, &mut rng)?;
            Ok(matrix_check(&z, |m| {
                let (l, g) = attacker_loss(&att, m, &privacy).unwrap();
                (l, g.z)
            }))
        }));
    }
    for variant in Variant::ALL {
        for (suffix, mode) in [
            ("", LinkLoss::Exact),
            (
                "_sampled",
                LinkLoss::Sampled {
                    negatives_per_positive: 3,
                },
            ),
        ] {
            let fx = fx.clone();
            checks.push(NamedCheck::new(
                format!("loss/obfuscator_{variant}{suffix}"),
                move || {
                    let (inp, dims) = fx.for_variant(variant);
                    let state = ModelState::init(variant, dims, &mut Rng::new(13))?;
                    let inp = inp.clone();
                    Ok(group_check(state, ParamGroup::Obfuscator, move |s| {
                        let (l, g) =
                            objective::obfuscator(s, &inp, 1.5, mode, &mut Rng::new(77)).unwrap();
                        (l.obf, g)
                    }))
                },
            ));
        }
    }
    Ok(checks)
}
