use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use privgraph::datagen::SynthParams;
use privgraph::eval::EvalConfig;
use privgraph::graphcore::{AttributeRole, AttributeSchema, AttributeSpec};
use privgraph::numkit::derive_seed;
use privgraph::training::TrainConfig;
use privgraph::Error;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{io_err, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttributeEntry {
    pub classes: usize,
    pub role: AttributeRole,
}

/// Graph files on disk; relative paths resolve against the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub edges: PathBuf,
    pub attributes: PathBuf,
    pub schema: BTreeMap<String, AttributeEntry>,
}

impl DataSection {
    pub fn schema(&self) -> privgraph::Result<AttributeSchema> {
        AttributeSchema::new(
            self.schema
                .iter()
                .map(|(name, e)| AttributeSpec {
                    name: name.clone(),
                    classes: e.classes,
                    role: e.role,
                })
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<DataSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthParams>,
    #[serde(default)]
    pub model: TrainConfig,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::from_value(Value::Object(Default::default()), None).expect("empty config is valid")
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let value: Value = serde_json::from_str(&text)?;
        RunConfig::from_value(value, path.parent())
    }

    /// Fills unseeded sections from the top-level seed, defaults the data
    /// source to the synthetic generator and validates every section.
    pub fn from_value(mut value: Value, base: Option<&Path>) -> CliResult<Self> {
        let obj = value
            .as_object_mut()
            .ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
        let seed = match obj.get("seed") {
            None => 0,
            Some(v) => v
                .as_u64()
                .ok_or_else(|| Error::Config("seed must be a non-negative integer".into()))?,
        };
        if obj.contains_key("data") && obj.contains_key("synth") {
            return Err(Error::Config("give either data or synth, not both".into()).into());
        }
        if !obj.contains_key("data") {
            obj.entry("synth").or_insert_with(|| Value::Object(Default::default()));
        }
        if let Value::Object(m) = obj.entry("model").or_insert_with(|| Value::Object(Default::default())) {
            m.entry("seed").or_insert(Value::from(seed));
        }
        if let Some(Value::Object(m)) = obj.get_mut("synth") {
            m.entry("seed").or_insert(Value::from(derive_seed(seed, "synth")));
        }
        let mut cfg: RunConfig = serde_json::from_value(value)?;
        if let (Some(data), Some(base)) = (cfg.data.as_mut(), base) {
            for p in [&mut data.edges, &mut data.attributes] {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
            data.schema()?;
        }
        if let Some(s) = &cfg.synth {
            s.validate()?;
        }
        cfg.model.validate()?;
        cfg.eval.validate()?;
        Ok(cfg)
    }
}
