mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};

use output::{CliError, Format, Log};

/// Finite-ball experiments on Cayley graphs: growth, quasi-isometries,
/// thin triangles, relative hyperbolicity and tree-graded spaces.
///
/// Exit status: 0 on success or PASS, 1 on a FAIL verdict (witnesses are
/// printed), 2 on usage or input errors. `CAYLEYLAB_MAX_VERTICES` overrides
/// the ball vertex cap.
#[derive(Parser, Debug)]
#[command(name = "cayleylab", version)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Seed for every random choice of the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Sidecar log with timestamps.
    #[arg(long, global = true)]
    pub log: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct GroupArgs {
    /// Group description: free:n, abelian:n, heis, bs:p,q, product(A;B),
    /// freeproduct(A;B).
    #[arg(long)]
    pub group: Option<String>,
    /// Presentation file.
    #[arg(long)]
    pub presentation: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate the ball B(R).
    Ball {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        radius: usize,
    },
    /// Ball and sphere sizes up to R, with a growth classification.
    Growth {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        radius: usize,
    },
    /// Word distance between two elements.
    Distance {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value = "1")]
        from: String,
        #[arg(long)]
        to: String,
        /// Ball used to certify the distance.
        #[arg(long, default_value_t = 16)]
        radius: usize,
    },
    /// Fit quasi-isometry constants to a stored map.
    QiFit {
        /// A qi-map/1 JSON record.
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 64.0)]
        l_max: f64,
        #[arg(long, default_value_t = 1.0)]
        c_budget: f64,
    },
    /// The collapsing map from the 3-regular tree onto the k-regular tree.
    TreeQi {
        #[arg(long)]
        valence: usize,
        #[arg(long)]
        radius: usize,
    },
    /// Check that a point set is a separated, covering net.
    NetCheck {
        /// Sample id: ball/<group>/<R>, tree/<k>/<R> or treeqi-image/<k>/<R>.
        #[arg(long)]
        sample: String,
        /// Net point indices, comma separated.
        #[arg(long)]
        net: String,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        epsilon: f64,
    },
    /// Probe the quasi-action induced by a homomorphism Λ → G.
    QuasiAction {
        #[command(flatten)]
        group: GroupArgs,
        /// The acting group Λ.
        #[arg(long)]
        lambda_group: String,
        /// Images in G of the generators of Λ, in order.
        #[arg(long)]
        images: String,
        #[arg(long)]
        lambda_radius: usize,
        #[arg(long)]
        radius: usize,
        /// Probe points are B_G(probe_radius).
        #[arg(long)]
        probe_radius: usize,
        /// Probed elements are B_Λ(lambda_probe_radius).
        #[arg(long, default_value_t = 2)]
        lambda_probe_radius: usize,
        #[arg(long, default_value_t = 0)]
        kernel_bound: u32,
    },
    /// Sampled thin-triangle constant.
    Delta {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        radius: usize,
        /// Further radii to sweep, comma separated.
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        /// Cone off these subgroups first (repeatable).
        #[arg(long)]
        peripheral: Vec<String>,
    },
    /// Hausdorff distance between a quasi-geodesic and geodesics.
    Morse {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value = "1")]
        start: String,
        /// Steps as whitespace-separated words.
        #[arg(long)]
        path: String,
        #[arg(long = "L", default_value_t = 1.0)]
        l: f64,
        #[arg(long = "C", default_value_t = 0.0)]
        c: f64,
    },
    /// Detour lengths around balls about the identity.
    Divergence {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        radius: usize,
        /// Scales r, comma separated (default 2..=R/2).
        #[arg(long)]
        r: Option<String>,
        #[arg(long, default_value_t = 64)]
        pairs: usize,
    },
    /// The ball with each peripheral coset coned off.
    ConedOff {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        peripheral: Vec<String>,
    },
    /// Bounded coset penetration on the geodesic corpus.
    Bcp {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        peripheral: Vec<String>,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 64)]
        per_endpoint: usize,
    },
    /// Hausdorff distance between windows of two cosets.
    CosetHausdorff {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        radius: usize,
        /// Subgroup generators.
        #[arg(long)]
        subgroup: String,
        #[arg(long, default_value = "1")]
        g1: String,
        #[arg(long)]
        g2: String,
        /// Window radii, comma separated (default 0..=R/2).
        #[arg(long)]
        rho: Option<String>,
    },
    /// Check the tree-graded axioms on a graph file.
    TreegradedVerify {
        #[arg(long)]
        file: PathBuf,
    },
    /// Nearest-point projection onto a piece.
    Project {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        piece: String,
    },
    /// The transversal tree through a vertex.
    Transversal {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        vertex: String,
    },
    /// Cut a loop into shorter loops by chords to its base point.
    ChordDivide {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value = "1")]
        start: String,
        /// Steps of the closed loop, whitespace separated.
        #[arg(long = "loop")]
        lp: String,
        #[arg(long, default_value_t = 2)]
        parts: usize,
    },
    /// Search for a Følner set.
    Folner {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        radius: usize,
        /// The finite set K, comma separated (default: generators and inverses).
        #[arg(long)]
        k: Option<String>,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 12)]
        size_cap: usize,
        /// Skip the ball and box candidates.
        #[arg(long)]
        exhaustive: bool,
        /// Compare the size found with this bound.
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Verify a ping-pong certificate for two elements acting on a ball.
    Pingpong {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 8)]
        radius: usize,
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = commands::SetRule::Prefix)]
        sets: commands::SetRule,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ball { .. } => "ball",
            Command::Growth { .. } => "growth",
            Command::Distance { .. } => "distance",
            Command::QiFit { .. } => "qi-fit",
            Command::TreeQi { .. } => "tree-qi",
            Command::NetCheck { .. } => "net-check",
            Command::QuasiAction { .. } => "quasi-action",
            Command::Delta { .. } => "delta",
            Command::Morse { .. } => "morse",
            Command::Divergence { .. } => "divergence",
            Command::ConedOff { .. } => "coned-off",
            Command::Bcp { .. } => "bcp",
            Command::CosetHausdorff { .. } => "coset-hausdorff",
            Command::TreegradedVerify { .. } => "treegraded-verify",
            Command::Project { .. } => "project",
            Command::Transversal { .. } => "transversal",
            Command::ChordDivide { .. } => "chord-divide",
            Command::Folner { .. } => "folner",
            Command::Pingpong { .. } => "pingpong",
        }
    }
}

fn synopsis(name: &str) -> String {
    let mut cmd = RunConfig::command();
    match cmd.find_subcommand_mut(name) {
        Some(sub) => sub.clone().bin_name(format!("cayleylab {name}")).render_usage().to_string(),
        None => cmd.render_usage().to_string(),
    }
}

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    let name = cfg.command.name();
    let mut log = match Log::open(cfg.log.as_deref()) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    log.line(&format!("start {name} format={} seed={}", cfg.format, cfg.seed));
    let started = std::time::Instant::now();
    let result = commands::run(&cfg).and_then(|r| output::write_primary(cfg.output.as_deref(), &r.text).map(|_| r.failed));
    let code = match result {
        Ok(false) => 0,
        Ok(true) => 1,
        Err(e) => {
            report_error(&cfg, name, &e);
            2
        }
    };
    log.line(&format!("exit {code} elapsed_ms={}", started.elapsed().as_millis()));
    ExitCode::from(code)
}

fn report_error(cfg: &RunConfig, name: &str, e: &CliError) {
    eprintln!("error: {e} [{}]", e.code());
    eprintln!("{}", synopsis(name));
    if cfg.format == Format::Json {
        let body = serde_json::json!({ "code": e.code(), "message": e.to_string() });
        let _ = output::write_primary(cfg.output.as_deref(), &output::json(&body));
    }
}
