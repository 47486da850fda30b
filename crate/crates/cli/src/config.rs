use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use picard_core::arithmetic::{CuspVariant, LatticeRule};
use picard_core::asymptotics::TrigVariant;
use picard_core::geometry::Model;
use picard_core::metric::MetricSign;
use picard_core::ErratumMode;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const DEFAULT_K_GRID: [u32; 6] = [16, 32, 64, 128, 256, 512];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::Subcommand)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Hyperbolic distance between two points, with Cayley images.
    Distance,
    /// Stabilizer cusp sums over a weight grid and the fitted exponent.
    CuspSum,
    /// Bergman metric, volume ratio and derivative check over a point grid.
    MetricScan,
    /// Poisson lower bound, cusp sum and compact-part upper bound per weight.
    Sandwich,
    /// Stabilizer translations of bounded size.
    Lattice,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Distance => "distance",
            Command::CuspSum => "cusp-sum",
            Command::MetricScan => "metric-scan",
            Command::Sandwich => "sandwich",
            Command::Lattice => "lattice",
        }
    }
}

/// Every option of every command. Flags and the JSON config file share this
/// shape; flags win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    #[arg(skip)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,

    /// Model of the input points: ball, hyperquadric or left-half.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// Squarefree d of the field Q(√-d).
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    /// Complex dimension.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Weight k (K = k(n+1)); replaces the grid.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    /// Comma-separated weights.
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_grid: Option<Vec<u32>>,
    /// Normalizing constant c.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Cap on |τ|² + |t| for cusp sums; the stabilizer bound for metric scans;
    /// the enumeration bound for `lattice`.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_bound: Option<f64>,
    /// Sum exactly up to --norm-bound instead of treating it as a cap.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_bound: Option<bool>,
    /// Worker threads; does not affect results.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Seed for --random-points.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Cusp neighborhood test: slab or literal.
    #[arg(long, global = true, value_parser = parse_tag::<CuspVariant>)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<CuspVariant>,
    /// corrected or paper-literal constants.
    #[arg(long, global = true, value_parser = parse_tag::<ErratumMode>)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub erratum_mode: Option<ErratumMode>,
    /// Stabilizer lattice rule: separate or coupled.
    #[arg(long, global = true, value_parser = parse_tag::<LatticeRule>)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<LatticeRule>,

    /// First point, comma-separated complex coordinates such as `0.1+0.2i,0`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,
    /// Second point.
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    /// Report the g31∘g13 round-trip residual.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roundtrip: Option<bool>,
    /// Report the images under every Cayley map from the model.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images: Option<bool>,
    /// ε of the cusp neighborhood test for left half-space points.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,

    /// Fixed α for cusp sums and sandwiches; α = K/4π per weight when absent.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Injectivity radius used by the compact-part bound.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_x: Option<f64>,
    /// Fourier modes in the Poisson lower bound.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_terms: Option<usize>,
    /// sinh or sin in the compact-part bound.
    #[arg(long, global = true, value_parser = parse_tag::<TrigVariant>)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trig: Option<TrigVariant>,

    /// Ball points as JSON `[[[re, im], …], …]`, inline or a file path.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    /// `half_width,count`: a count × count grid in the z_1 plane.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_box: Option<String>,
    /// Uniform random ball points of radius below 0.9, drawn from --seed.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_points: Option<usize>,
    /// Explicit ball-model group elements as JSON `[[[[re, im], …], …], …]`,
    /// inline or a file path; replaces the stabilizer set.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<String>,
    /// Use the identity as the only group element.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity_only: Option<bool>,
    /// Add the boosts of rapidity ±s to the stabilizer set.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boost: Option<f64>,
    /// as-stated or flipped sign of the metric matrix.
    #[arg(long, global = true, value_parser = parse_tag::<MetricSign>)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<MetricSign>,
}

/// Parse a kebab-case enum tag through its serde representation.
fn parse_tag<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overridden_by(mut self, flags: &RunConfig) -> Self {
        overlay!(self, flags; command, model, d, n, k, k_grid, c, norm_bound, exact_bound, threads, out, seed,
            variant, erratum_mode, rule, z, w, roundtrip, images, epsilon, alpha, r_x, m_terms, trig, grid,
            grid_box, random_points, elements, identity_only, boost, sign);
        self
    }

    /// Fill the defaults a command reads so the header records a complete,
    /// replayable configuration.
    pub fn resolved(mut self) -> anyhow::Result<Self> {
        let Some(command) = self.command else {
            bail!("no command given on the command line or in the config file");
        };
        let mode = *self.erratum_mode.get_or_insert(ErratumMode::Corrected);
        match command {
            Command::Distance => {
                self.model.get_or_insert_with(|| "ball".into());
                self.roundtrip.get_or_insert(false);
                self.images.get_or_insert(false);
                self.variant.get_or_insert(CuspVariant::Slab);
                self.epsilon.get_or_insert(1.0);
                if self.z.is_none() || self.w.is_none() {
                    bail!("distance needs --z and --w");
                }
            }
            Command::CuspSum | Command::Sandwich => {
                self.d.get_or_insert(3);
                self.n.get_or_insert(2);
                self.c.get_or_insert(1.0);
                self.rule.get_or_insert(LatticeRule::Separate);
                self.exact_bound.get_or_insert(false);
                if let Some(k) = self.k.take() {
                    self.k_grid = Some(vec![k]);
                }
                self.k_grid.get_or_insert_with(|| DEFAULT_K_GRID.to_vec());
                if self.exact_bound == Some(true) && self.norm_bound.is_none() {
                    bail!("--exact-bound needs --norm-bound");
                }
                if command == Command::Sandwich {
                    self.r_x.get_or_insert(1.0);
                    self.m_terms.get_or_insert(64);
                    self.trig.get_or_insert(match mode {
                        ErratumMode::Corrected => TrigVariant::Sinh,
                        ErratumMode::PaperLiteral => TrigVariant::Sin,
                    });
                }
            }
            Command::MetricScan => {
                self.d.get_or_insert(3);
                self.n.get_or_insert(2);
                self.k.get_or_insert(2);
                self.c.get_or_insert(1.0);
                self.rule.get_or_insert(LatticeRule::Separate);
                self.identity_only.get_or_insert(false);
                self.sign.get_or_insert(MetricSign::AsStated);
                if self.identity_only == Some(false) && self.elements.is_none() {
                    self.norm_bound.get_or_insert(2.0);
                }
                if self.random_points.is_some() {
                    self.seed.get_or_insert(0);
                }
                let sources = [
                    self.grid.is_some(),
                    self.grid_box.is_some(),
                    self.random_points.is_some(),
                ]
                .iter()
                .filter(|b| **b)
                .count();
                if sources > 1 {
                    bail!("--grid, --grid-box and --random-points are mutually exclusive");
                }
            }
            Command::Lattice => {
                self.d.get_or_insert(3);
                self.n.get_or_insert(2);
                self.rule.get_or_insert(LatticeRule::Separate);
                if self.norm_bound.is_none() {
                    bail!("lattice needs --norm-bound");
                }
            }
        }
        Ok(self)
    }

    pub fn command(&self) -> Command {
        self.command.expect("resolved configs carry a command")
    }

    pub fn model(&self) -> anyhow::Result<Model> {
        let name = self.model.as_deref().unwrap_or("ball");
        Ok(name.parse()?)
    }

    /// The configuration without the fields that must not change results.
    pub fn replayable(&self) -> Self {
        Self {
            threads: None,
            out: None,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.replayable()).expect("configs serialize")
    }

    /// SHA-256 of the replayable JSON.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}
