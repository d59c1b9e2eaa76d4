//! Command-line front end: surface ingestion, divisor-invariant commands,
//! lemma property runs and the K-stability verdict pipelines.
//!
//! Exit codes: 0 success, 1 domain/input error, 2 internal invariant
//! violation.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fano_cli::report::ReportDoc;
use fano_cli::{hypersurface_verdict, threefold_verdict, HypersurfaceQuery, ThreefoldQuery};
use fano_core::concavity_lab::{center_div_case, center_pt_case};
use fano_core::delta_engine::surface_delta_bound;
use fano_core::error::{Error, Result};
use fano_core::ns_lattice::{blow_up, load_surface, DivClass, PointSpec, SurfaceModel};
use fano_core::rat::Rat;
use fano_core::rayscan::RayScan;
use fano_core::zariski::zariski_decompose;

#[derive(Parser)]
#[command(
    name = "fano-cli",
    version,
    about = "Exact divisor invariants on surfaces and K-stability verdict chains"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Inspect a surface model
    Surface {
        #[command(subcommand)]
        cmd: SurfaceCmd,
    },
    /// Zariski decomposition of a class against the surface's catalog
    Zariski {
        /// `builtin:<name>` or a JSON surface file
        source: String,
        /// comma-separated rational coordinates, e.g. `1,1,-3/2`
        #[arg(long, allow_hyphen_values = true)]
        class: String,
    },
    /// Exact volume and restricted-volume profiles along a ray
    Volume {
        source: String,
        /// ample class on the surface (base surface for `--ray general`)
        #[arg(long, allow_hyphen_values = true)]
        ample: String,
        /// `general` (blowup of a general point) or `curve:<name>`
        #[arg(long)]
        ray: String,
        /// write a CSV sample of the profiles to this path
        #[arg(long)]
        csv: Option<PathBuf>,
        /// sampling step for the CSV, as a rational
        #[arg(long, default_value = "1/10")]
        step: String,
    },
    /// Full invariant report with the stability-threshold lower bound
    Invariants {
        source: String,
        #[arg(long, allow_hyphen_values = true)]
        ample: String,
        /// only `general` is supported on the command line
        #[arg(long, default_value = "general")]
        point: String,
    },
    /// Seeded property runs of the two concavity inequalities (TSV output)
    VerifyLemma {
        kind: LemmaKindArg,
        #[arg(long, default_value_t = 100)]
        cases: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// K-stability verdict for a smooth Fano hypersurface
    Hypersurface {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        r: u64,
    },
    /// K-stability verdict for a Fano threefold of Picard number one
    Threefold {
        #[arg(long)]
        index: u8,
        #[arg(long)]
        degree: u64,
        /// JSON file mapping degree to the quoted Seshadri lower bound
        #[arg(long)]
        eps_table: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        m_max: u64,
    },
    /// Re-emit a saved report after round-trip validation
    Report {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
    },
}

#[derive(Subcommand)]
enum SurfaceCmd {
    /// Print the validated lattice data and curve catalog
    Info { source: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum LemmaKindArg {
    CenterPt,
    CenterDiv,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Tsv,
}

fn parse_class(s: &str, rank: usize) -> Result<DivClass> {
    let coords = s.split(',').map(Rat::parse).collect::<Result<Vec<_>>>()?;
    if coords.len() != rank {
        return Err(Error::Input(format!(
            "class has {} coordinates, surface rank is {rank}",
            coords.len()
        )));
    }
    Ok(DivClass(coords))
}

#[derive(Serialize)]
struct SurfaceInfo {
    name: String,
    rank: usize,
    signature: String,
    catalog_complete: bool,
    negative_curve_count: usize,
    gram: Vec<Vec<Rat>>,
    canonical: Vec<Rat>,
    ample_ref: Vec<Rat>,
    curves: Vec<CurveInfo>,
}

#[derive(Serialize)]
struct CurveInfo {
    name: String,
    class: Vec<Rat>,
    self_int: Rat,
    #[serde(skip_serializing_if = "Option::is_none")]
    genus: Option<u32>,
}

#[derive(Serialize)]
struct ZariskiOut {
    surface: String,
    class: Vec<Rat>,
    positive: Vec<Rat>,
    support: Vec<SupportOut>,
    volume: Rat,
    leading_minors: Vec<Rat>,
    trusted: bool,
}

#[derive(Serialize)]
struct SupportOut {
    name: String,
    class: Vec<Rat>,
    coeff: Rat,
}

#[derive(Serialize)]
struct RayOut {
    surface: String,
    ample: Vec<Rat>,
    eps: Rat,
    eta: Rat,
    tau: Rat,
    s_invariant: Rat,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_part_degree: Option<Rat>,
    vol_profile: fano_core::poly::PiecewisePoly,
    restricted_profile: fano_core::poly::PiecewisePoly,
}

fn emit<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Internal(format!("serialization failed: {e}")))?;
    println!("{text}");
    Ok(())
}

fn scan_for_ray(s: &SurfaceModel, ample: &str, ray: &str) -> Result<RayScan> {
    if ray == "general" {
        let l = parse_class(ample, s.rank)?;
        let pm = blow_up(s, &PointSpec::General)?;
        RayScan::over_point(&pm, &l)
    } else if let Some(name) = ray.strip_prefix("curve:") {
        let l = parse_class(ample, s.rank)?;
        let entry = s
            .curve_by_name(name)
            .ok_or_else(|| Error::Input(format!("no catalog curve named `{name}`")))?
            .clone();
        RayScan::along_curve(s, &l, &entry.cls)
    } else {
        Err(Error::Input(format!(
            "ray must be `general` or `curve:<name>`, got `{ray}`"
        )))
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Surface {
            cmd: SurfaceCmd::Info { source },
        } => {
            let s = load_surface(&source)?;
            emit(&SurfaceInfo {
                name: s.name.clone(),
                rank: s.rank,
                signature: format!("(1, {})", s.rank - 1),
                catalog_complete: s.catalog_complete,
                negative_curve_count: s.negative_curves().count(),
                gram: s.gram.clone(),
                canonical: s.canonical.0.clone(),
                ample_ref: s.ample_ref.0.clone(),
                curves: s
                    .curves
                    .iter()
                    .map(|c| CurveInfo {
                        name: c.name.clone(),
                        class: c.cls.0.clone(),
                        self_int: c.self_int.clone(),
                        genus: c.arith_genus,
                    })
                    .collect(),
            })
        }
        Cmd::Zariski { source, class } => {
            let s = load_surface(&source)?;
            let d = parse_class(&class, s.rank)?;
            let z = zariski_decompose(&d, &s)?;
            emit(&ZariskiOut {
                surface: s.name.clone(),
                class: d.0.clone(),
                positive: z.positive.0.clone(),
                support: z
                    .negative_support
                    .iter()
                    .map(|(c, a)| SupportOut {
                        name: c.name.clone(),
                        class: c.cls.0.clone(),
                        coeff: a.clone(),
                    })
                    .collect(),
                volume: z.volume(&s),
                leading_minors: z.certificate.leading_minors.clone(),
                trusted: z.trusted,
            })
        }
        Cmd::Volume {
            source,
            ample,
            ray,
            csv,
            step,
        } => {
            let s = load_surface(&source)?;
            let scan = scan_for_ray(&s, &ample, &ray)?;
            let (eps, eta, tau) = scan.thresholds()?;
            let out = RayOut {
                surface: s.name.clone(),
                ample: scan.class_at_zero().0.clone(),
                eps,
                eta,
                tau,
                s_invariant: scan.s_invariant()?,
                fixed_part_degree: scan.fixed_part_degree().ok(),
                vol_profile: scan.vol_profile()?,
                restricted_profile: scan.restricted_profile()?,
            };
            if let Some(path) = csv {
                let step = Rat::parse(&step)?;
                let mut buf = Vec::new();
                scan.write_csv(&step, &mut buf)?;
                std::fs::write(&path, buf)
                    .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))?;
            }
            emit(&out)
        }
        Cmd::Invariants {
            source,
            ample,
            point,
        } => {
            if point != "general" {
                return Err(Error::Input(
                    "only `--point general` is supported here; explicit points are a library \
                     feature"
                        .into(),
                ));
            }
            let s = load_surface(&source)?;
            let l = parse_class(&ample, s.rank)?;
            let pm = blow_up(&s, &PointSpec::General)?;
            let report = surface_delta_bound(&s, &l, &pm)?;
            emit(&report)
        }
        Cmd::VerifyLemma { kind, cases, seed } => {
            println!("seed\tlhs\trhs\tmargin\tequality");
            for i in 0..cases {
                let case_seed = seed.wrapping_add(i);
                let chk = match kind {
                    LemmaKindArg::CenterPt => center_pt_case(case_seed)?,
                    LemmaKindArg::CenterDiv => center_div_case(case_seed)?.1,
                };
                println!(
                    "{case_seed}\t{}\t{}\t{}\t{}",
                    chk.lhs,
                    chk.rhs,
                    &chk.rhs - &chk.lhs,
                    chk.equality
                );
            }
            Ok(())
        }
        Cmd::Hypersurface { n, r } => {
            let q = HypersurfaceQuery::new(n, r)?;
            emit(&hypersurface_verdict(&q))
        }
        Cmd::Threefold {
            index,
            degree,
            eps_table,
            m_max,
        } => {
            let table = match eps_table {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        Error::Input(format!("cannot read {}: {e}", path.display()))
                    })?;
                    serde_json::from_str::<BTreeMap<u64, Rat>>(&text)
                        .map_err(|e| Error::Input(format!("eps table: {e}")))?
                }
                None => fano_cli::default_eps_table(),
            };
            let q = ThreefoldQuery::with_table(index, degree, table, m_max)?;
            emit(&threefold_verdict(&q)?)
        }
        Cmd::Report { file, format } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| Error::Input(format!("cannot read {}: {e}", file.display())))?;
            let doc = ReportDoc::parse_validated(&text)?;
            match format {
                FormatArg::Json => println!("{}", doc.to_json()?),
                FormatArg::Tsv => println!("{}", doc.to_tsv()?),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Internal(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
