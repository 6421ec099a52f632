use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "mflab", version, about = "Finite-dimensional MF constructions with certified numerics")]
pub struct Cli {
    /// Where to write the JSON report; `-` is standard output.
    #[arg(long, short, global = true, default_value = "-")]
    pub out: String,
    /// Add wall-clock seconds to the report (breaks byte reproducibility).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dilate an exactly commuting pair and certify the commutator bound.
    Dilate(DilateArgs),
    /// Pimsner–Voiculescu frame commutator decay table.
    Pv(PvArgs),
    /// Crossed-product matrix models for a Z-action on a random base tuple.
    Crossed(CrossedArgs),
    /// Covariance residuals of the regular representation for a finite group.
    FiniteCrossed(FiniteCrossedArgs),
    /// Fuzz the free-group freeness witnesses.
    Freeness(FreenessArgs),
    /// Coset decompositions in the built-in finite-index systems.
    Coset(CosetArgs),
    /// Sup norms over the circle or a torus.
    Norm(NormArgs),
    /// Cayley-ball lower bounds for the reduced C*-norm on F_n.
    Ball(BallArgs),
    /// Compare matrix models against a norm oracle.
    Report(ReportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Dilate(_) => "dilate",
            Command::Pv(_) => "pv",
            Command::Crossed(_) => "crossed",
            Command::FiniteCrossed(_) => "finite-crossed",
            Command::Freeness(_) => "freeness",
            Command::Coset(_) => "coset",
            Command::Norm(_) => "norm",
            Command::Ball(_) => "ball",
            Command::Report(_) => "report",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DilateArgs {
    /// DilationInput JSON file.
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    pub input: Option<String>,
    /// Random input, e.g. `dim=16,n=2,m=2,seed=7` (optional `rank=`, `eps=`).
    #[arg(long)]
    pub random: Option<String>,
    /// Independent random inputs; trial k uses seed + k.
    #[arg(long, default_value_t = 1, requires = "random")]
    pub trials: usize,
    /// Square-root approximation slack.
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// Also certify the commutator and Q-norm conditions at 1/r1.
    #[arg(long)]
    pub r1: Option<usize>,
    /// Q polynomials in the V variables, compared against the input v's.
    #[arg(long = "q-poly")]
    pub q_polys: Vec<String>,
    /// Include the dilated matrices in the payload.
    #[arg(long)]
    pub matrices: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PvArgs {
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32,64,128,256")]
    pub nj: Vec<usize>,
    /// Ambient half-width as a multiple of n_j.
    #[arg(long, default_value_t = 4)]
    pub width_factor: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CrossedArgs {
    /// Gauge angle: α(n) multiplies each generator by e^{2πinθ}.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub nj: Vec<usize>,
    /// Dimension of the Haar base unitaries.
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    /// Number of base generators.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long)]
    pub seed: u64,
    /// Rank of the compressing projection; defaults to `dim`.
    #[arg(long)]
    pub p_rank: Option<usize>,
    /// Polynomials in U compared against the circle oracle.
    #[arg(long = "g-poly", default_value = "X1 + X1'")]
    pub g_polys: Vec<String>,
    /// Polynomials in (A_1..A_m, B_1..B_m) compared with the base pair.
    #[arg(long = "h-poly")]
    pub h_polys: Vec<String>,
    /// Polynomials in (A_1..A_m, U), reported as plain norms.
    #[arg(long = "p-poly")]
    pub p_polys: Vec<String>,
    /// Certify every model at 1/r1.
    #[arg(long)]
    pub r1: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FiniteCrossedArgs {
    /// `Z<p>` (acting on M_2 by Ad diag(1, e^{2πik/p})) or `S<n>` (standard
    /// representation on M_{n-1}).
    #[arg(long)]
    pub group: String,
    /// Random elements a of the base algebra.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
    /// Largest accepted entrywise covariance residual.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FreenessArgs {
    /// Free-group rank (lower end when `--n-max` is given).
    #[arg(long)]
    pub n: usize,
    /// Number of blocks (lower end when `--m-max` is given).
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub m_max: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    /// Largest |n_i|.
    #[arg(long, default_value_t = 3)]
    pub exp_max: i64,
    /// g = (g_1⋯g_n)^power. Only power 3 is certified.
    #[arg(long, default_value_t = 3)]
    pub power: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CosetArgs {
    /// `z-<k>z` or `f<n>-s<n>`.
    #[arg(long, visible_alias = "example", default_value = "z-2z")]
    pub system: String,
    /// Elements to decompose, e.g. `t^5` or `g1*g2^-1|2,1`.
    #[arg(long = "g", visible_alias = "elem")]
    pub elems: Vec<String>,
    /// Number of random elements to decompose as well.
    #[arg(long, default_value_t = 0, requires = "seed")]
    pub random: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Size bound for random elements.
    #[arg(long, default_value_t = 8)]
    pub size: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NormArgs {
    /// `circle` or `torus`.
    #[arg(long, default_value = "circle")]
    pub oracle: String,
    /// Torus dimension; defaults to the largest variable index used.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long = "poly", required = true)]
    pub polys: Vec<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BallArgs {
    /// Rank of the free group.
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub poly: String,
    #[arg(long)]
    pub radius: usize,
    /// Also report every radius from this one up to `--radius`.
    #[arg(long)]
    pub from: Option<usize>,
    /// Refuse balls with more vertices than this.
    #[arg(long, default_value_t = mflab::mfcheck::DEFAULT_VERTEX_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    /// JSON array of tuples `{"dim": d, "mats": [...]}`.
    #[arg(long)]
    pub models: String,
    /// One polynomial per line; `#` starts a comment.
    #[arg(long)]
    pub polys: String,
    /// `circle`, `torus`, `exact:<tuple.json>`, `ball:<n>:<radius>` or
    /// `constant:<v1>,<v2>,...`.
    #[arg(long)]
    pub oracle: String,
    /// Certify that every exact deviation is at most this.
    #[arg(long)]
    pub max_deviation: Option<f64>,
}
