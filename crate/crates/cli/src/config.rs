//! Layered configuration: flags over environment over file over defaults.

use std::fs;
use std::path::{Path, PathBuf};

use ontoslice::gateway::{LiveEndpoint, Transcript};
use ontoslice::verbalizer::CatalogStyle;
use ontoslice::{LlmProvider, PipelineConfig};
use serde::Deserialize;

use crate::Failure;

pub const CONFIG_ENV: &str = "ONTOSLICE_CONFIG";
pub const API_KEY_ENV: &str = "ONTOSLICE_API_KEY";
pub const DEFAULT_CONFIG: &str = "ontoslice.toml";
pub const DEFAULT_LOG_DIR: &str = "ontoslice-logs";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub ontology_path: Option<PathBuf>,
    pub log_dir: Option<PathBuf>,
    pub context_budget_tokens: Option<usize>,
    pub max_refinement_steps: Option<usize>,
    pub max_hops: Option<usize>,
    pub catalog_style: Option<CatalogStyle>,
    pub provider: Option<ProviderConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProviderConfig {
    Scripted {
        transcript: PathBuf,
    },
    Live {
        endpoint: String,
        model: String,
        #[serde(default = "default_timeout")]
        timeout_secs: u64,
        #[serde(default = "default_retries")]
        max_retries: u32,
    },
}

fn default_timeout() -> u64 {
    60
}

fn default_retries() -> u32 {
    2
}

/// Settings given on the command line; `None` defers to lower layers.
#[derive(Debug, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub ontology: Option<PathBuf>,
    pub log_dir: Option<PathBuf>,
    pub context_budget_tokens: Option<usize>,
    pub max_refinement_steps: Option<usize>,
    pub max_hops: Option<usize>,
    pub transcript: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub model: Option<String>,
}

#[derive(Debug)]
pub struct Config {
    pub ontology_path: Option<PathBuf>,
    pub log_dir: PathBuf,
    pub pipeline: PipelineConfig,
    provider: Option<ProviderConfig>,
    api_key: Option<String>,
}

impl Config {
    /// Resolves every layer. `config_env` and `api_key` are the raw values of
    /// the two environment variables.
    pub fn load(
        flags: Overrides,
        config_env: Option<PathBuf>,
        api_key: Option<String>,
    ) -> Result<Config, Failure> {
        let explicit = flags.config.or(config_env);
        let (file, base) = match &explicit {
            Some(path) => (read_file(path)?, parent_of(path)),
            None if Path::new(DEFAULT_CONFIG).is_file() => {
                (read_file(Path::new(DEFAULT_CONFIG))?, PathBuf::new())
            }
            None => (FileConfig::default(), PathBuf::new()),
        };
        let relative = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };

        let defaults = PipelineConfig::default();
        let pipeline = PipelineConfig {
            context_budget_tokens: flags
                .context_budget_tokens
                .or(file.context_budget_tokens)
                .unwrap_or(defaults.context_budget_tokens),
            max_refinement_steps: flags
                .max_refinement_steps
                .or(file.max_refinement_steps)
                .unwrap_or(defaults.max_refinement_steps),
            max_hops: flags
                .max_hops
                .or(file.max_hops)
                .unwrap_or(defaults.max_hops),
            catalog_style: file.catalog_style.unwrap_or(defaults.catalog_style),
        };
        if pipeline.context_budget_tokens == 0
            || pipeline.max_refinement_steps == 0
            || pipeline.max_hops == 0
        {
            return Err(Failure::usage("budgets and limits must be positive"));
        }

        let provider = match (flags.transcript, flags.endpoint, file.provider) {
            (Some(_), Some(_), _) => {
                return Err(Failure::usage(
                    "--transcript and --endpoint are mutually exclusive",
                ))
            }
            (Some(transcript), None, _) => Some(ProviderConfig::Scripted { transcript }),
            (None, Some(endpoint), file_provider) => {
                let (timeout_secs, max_retries, file_model) = match file_provider {
                    Some(ProviderConfig::Live {
                        timeout_secs,
                        max_retries,
                        model,
                        ..
                    }) => (timeout_secs, max_retries, Some(model)),
                    _ => (default_timeout(), default_retries(), None),
                };
                let model = flags.model.or(file_model).ok_or_else(|| {
                    Failure::usage("--endpoint needs a model (--model or config file)")
                })?;
                Some(ProviderConfig::Live {
                    endpoint,
                    model,
                    timeout_secs,
                    max_retries,
                })
            }
            (None, None, Some(ProviderConfig::Scripted { transcript })) => {
                Some(ProviderConfig::Scripted {
                    transcript: relative(transcript),
                })
            }
            (
                None,
                None,
                Some(ProviderConfig::Live {
                    endpoint,
                    model,
                    timeout_secs,
                    max_retries,
                }),
            ) => Some(ProviderConfig::Live {
                endpoint,
                model: flags.model.unwrap_or(model),
                timeout_secs,
                max_retries,
            }),
            (None, None, None) => None,
        };

        Ok(Config {
            ontology_path: flags.ontology.or(file.ontology_path.map(&relative)),
            log_dir: flags
                .log_dir
                .or(file.log_dir.map(&relative))
                .unwrap_or_else(|| PathBuf::from(DEFAULT_LOG_DIR)),
            pipeline,
            provider,
            api_key: api_key.filter(|k| !k.is_empty()),
        })
    }

    pub fn ontology_path(&self) -> Result<&Path, Failure> {
        self.ontology_path.as_deref().ok_or_else(|| {
            Failure::usage("no ontology given (--ontology or ontology_path in the config file)")
        })
    }

    pub fn provider(&self) -> Result<LlmProvider, Failure> {
        match &self.provider {
            None => Err(Failure::usage(
                "no provider configured (--transcript, --endpoint or [provider] in the config file)",
            )),
            Some(ProviderConfig::Scripted { transcript }) => {
                let text = fs::read_to_string(transcript)
                    .map_err(|e| Failure::io(format!("{}: {e}", transcript.display())))?;
                let transcript = Transcript::from_json(&text)
                    .map_err(|e| Failure::parse(format!("{}: {e}", transcript.display())))?;
                Ok(LlmProvider::Scripted(transcript))
            }
            Some(ProviderConfig::Live {
                endpoint,
                model,
                timeout_secs,
                max_retries,
            }) => Ok(LlmProvider::Live(LiveEndpoint {
                endpoint: endpoint.clone(),
                model: model.clone(),
                timeout_secs: *timeout_secs,
                max_retries: *max_retries,
                api_key: self.api_key.clone(),
            })),
        }
    }
}

fn read_file(path: &Path) -> Result<FileConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read config file {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn parent_of(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn defaults_without_any_layer() {
        let c = Config::load(Overrides::default(), None, None).unwrap();
        assert_eq!(c.pipeline, PipelineConfig::default());
        assert_eq!(c.log_dir, PathBuf::from(DEFAULT_LOG_DIR));
        assert!(c.provider().is_err());
    }

    #[test]
    fn flags_beat_environment_beat_file() {
        let file =
            write_config("max_hops = 3\nmax_refinement_steps = 2\nontology_path = \"o.ttl\"\n");
        let env_file = write_config("max_hops = 4\n");
        let flags = Overrides {
            config: Some(file.path().to_path_buf()),
            max_refinement_steps: Some(9),
            ..Overrides::default()
        };
        let c = Config::load(flags, Some(env_file.path().to_path_buf()), None).unwrap();
        assert_eq!(c.pipeline.max_hops, 3);
        assert_eq!(c.pipeline.max_refinement_steps, 9);
        assert_eq!(
            c.ontology_path.unwrap(),
            file.path().parent().unwrap().join("o.ttl")
        );

        let c = Config::load(
            Overrides::default(),
            Some(env_file.path().to_path_buf()),
            None,
        )
        .unwrap();
        assert_eq!(c.pipeline.max_hops, 4);
    }

    #[test]
    fn missing_or_invalid_config_is_a_usage_error() {
        let err = Config::load(
            Overrides {
                config: Some("/nonexistent/ontoslice.toml".into()),
                ..Overrides::default()
            },
            None,
            None,
        )
        .unwrap_err();
        assert_eq!(err.code, crate::exit::USAGE);
        let bad = write_config("max_hops = \"many\"\n");
        assert_eq!(
            Config::load(Overrides::default(), Some(bad.path().into()), None)
                .unwrap_err()
                .code,
            crate::exit::USAGE
        );
        let unknown = write_config("api_key = \"secret\"\n");
        assert!(Config::load(Overrides::default(), Some(unknown.path().into()), None).is_err());
        let zero = write_config("max_hops = 0\n");
        assert!(Config::load(Overrides::default(), Some(zero.path().into()), None).is_err());
    }

    #[test]
    fn live_provider_takes_the_key_from_the_environment() {
        let file = write_config(
            "[provider]\nkind = \"live\"\nendpoint = \"http://localhost:1/v1\"\nmodel = \"m\"\n",
        );
        let c = Config::load(
            Overrides::default(),
            Some(file.path().into()),
            Some("k".into()),
        )
        .unwrap();
        match c.provider().unwrap() {
            LlmProvider::Live(e) => {
                assert_eq!(e.api_key.as_deref(), Some("k"));
                assert_eq!((e.timeout_secs, e.max_retries), (60, 2));
            }
            other => panic!("{other:?}"),
        }
        let flags = Overrides {
            config: Some(file.path().into()),
            transcript: Some("t.json".into()),
            ..Overrides::default()
        };
        let c = Config::load(flags, None, None).unwrap();
        assert!(matches!(c.provider, Some(ProviderConfig::Scripted { .. })));
    }
}
