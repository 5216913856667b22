//! `k3fm`: Fourier-Mukai numbers of K3 surfaces from their Néron-Severi
//! lattices.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use k3fm_core::bqf::{is_fundamental, proper_classes};
use k3fm_core::discriminant::DiscriminantGroup;
use k3fm_core::fm::{fm_number, fm_number_rank1, fm_table, gauss_scan, rank2_genus, NeronSeveriSpec, TABLE_PRIMES};
use k3fm_core::glue::{glue, gluing_classes, verify_orbit_counts, verify_overlattice};
use k3fm_core::hodge::HodgeGroupSpec;
use k3fm_core::io::{parse_hodge_action, parse_lattice, parse_lattice_list};
use k3fm_core::lattice::{IntegerLattice, Signature};
use k3fm_core::matrix::smith_normal_form;
use k3fm_core::qform::{isometries_signed, Sign, DEFAULT_CAP};
use k3fm_core::Error;
use num_bigint::BigInt;

#[derive(Parser)]
#[command(name = "k3fm", version, about = "Fourier-Mukai numbers of K3 surfaces")]
struct Cli {
    /// Output style for tabular results.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Invariant factors and generator q-values of the discriminant form.
    Discform { lattice: PathBuf },
    /// Fourier-Mukai number of a K3 surface with the given Néron-Severi lattice.
    Fm {
        /// JSON file with the Néron-Severi lattice.
        #[arg(long, conflicts_with = "rank1", required_unless_present = "rank1")]
        lattice: Option<PathBuf>,
        /// Shortcut for NS = <2n>.
        #[arg(long)]
        rank1: Option<u64>,
        /// Order 2I of the Hodge isometry group of T.
        #[arg(long, conflicts_with = "rank1")]
        hodge_order: Option<u64>,
        /// JSON file with the generator of the Hodge group.
        #[arg(long, conflicts_with = "rank1")]
        hodge_action: Option<PathBuf>,
    },
    /// Number of proper classes of binary forms of discriminant D.
    Classnum { d: BigInt },
    /// Cycles, genera and ambiguous classes of discriminant D.
    Genus { d: BigInt },
    /// Rows (p, h(p), |FM|) for NS of determinant -p.
    Table {
        /// Comma-separated primes replacing the default list.
        #[arg(long, value_delimiter = ',')]
        list: Option<Vec<u64>>,
    },
    /// |FM| over all primes p = 1 mod 4 up to a bound.
    Scan {
        /// Largest prime to scan.
        #[arg(long)]
        max: u64,
    },
    /// Gluings of S and T into even unimodular lattices.
    Glue {
        /// JSON file with S.
        #[arg(long)]
        s: PathBuf,
        /// JSON file with T.
        #[arg(long)]
        t: PathBuf,
        /// Print every glued Gram matrix.
        #[arg(long)]
        list: bool,
    },
    /// Compare gluing orbits with double coset counts per genus member.
    #[command(name = "verify-t14")]
    VerifyOrbits {
        /// One lattice or an array of genus representatives.
        #[arg(long)]
        s: PathBuf,
        /// JSON file with T.
        #[arg(long)]
        t: PathBuf,
        /// Order of the Hodge group acting on T.
        #[arg(long, default_value_t = 2)]
        g_order: u64,
    },
}

enum Failure {
    Core(Error),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = std::result::Result<String, Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::DegenerateLattice | Error::OddLattice => 2,
        Error::Unsupported(_) => 3,
        Error::CapExceeded { .. } => 4,
        Error::Invariant(_) => 1,
    }
}

fn cap_from_env() -> Result<u64, Error> {
    match std::env::var("K3FM_CAP") {
        Err(_) => Ok(DEFAULT_CAP),
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| Error::InvalidInput(format!("K3FM_CAP must be a positive integer, got {v:?}"))),
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn load_lattice(path: &Path) -> Result<IntegerLattice, Error> {
    parse_lattice(&read(path)?)
}

/// Right-aligned text columns or CSV with a header row.
fn render(format: Format, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(&header.join(","));
            out.push('\n');
            for r in rows {
                out.push_str(&r.join(","));
                out.push('\n');
            }
        }
        Format::Text => {
            let widths: Vec<usize> = (0..header.len())
                .map(|i| {
                    rows.iter()
                        .map(|r| r[i].len())
                        .chain([header[i].len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: Vec<&str>| {
                let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
                padded.join("  ").trim_end().to_string()
            };
            out.push_str(&line(header.to_vec()));
            out.push('\n');
            for r in rows {
                out.push_str(&line(r.iter().map(String::as_str).collect()));
                out.push('\n');
            }
        }
    }
    out
}

fn discform(path: &Path) -> Outcome {
    let l = load_lattice(path)?;
    let d = DiscriminantGroup::new(&l)?;
    let factors: Vec<String> = smith_normal_form(l.gram())
        .invariant_factors()
        .iter()
        .filter(|x| **x != BigInt::from(1))
        .map(ToString::to_string)
        .collect();
    let a = d.form();
    let mut out = String::new();
    writeln!(out, "det={}", l.det()).unwrap();
    writeln!(out, "invariant_factors=[{}]", factors.join(",")).unwrap();
    writeln!(out, "order={}", l.det().magnitude()).unwrap();
    for (i, (n, q)) in a.orders().iter().zip(a.q_gens()).enumerate() {
        writeln!(out, "g{i}: order={n} q={q}").unwrap();
    }
    let k = a.num_generators();
    for i in 0..k {
        for j in i + 1..k {
            writeln!(out, "b(g{i},g{j})={}", a.b_matrix()[i][j]).unwrap();
        }
    }
    Ok(out)
}

fn hodge_spec(order: Option<u64>, action: Option<&Path>) -> Result<HodgeGroupSpec, Error> {
    let (file_order, action) = match action {
        Some(p) => {
            let (o, a) = parse_hodge_action(&read(p)?)?;
            (o, Some(a))
        }
        None => (None, None),
    };
    let order = match (order, file_order) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::InvalidInput(format!(
                "--hodge-order {a} disagrees with order {b} in the action file"
            )))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => 2,
    };
    HodgeGroupSpec::new(order, action)
}

fn fm(format: Format, lattice: Option<&Path>, rank1: Option<u64>, hodge: HodgeGroupSpec, cap: u64) -> Outcome {
    let result = match (lattice, rank1) {
        (_, Some(n)) => fm_number_rank1(n, cap)?,
        (Some(p), None) => fm_number(&NeronSeveriSpec::new(load_lattice(p)?)?, &hodge, cap)?,
        (None, None) => return Err(Error::InvalidInput("one of --lattice or --rank1 is required".into()).into()),
    };
    if rank1.is_some() {
        return Ok(format!("fm={}\n", result.total));
    }
    let rows: Vec<Vec<String>> = result
        .breakdown
        .iter()
        .enumerate()
        .map(|(j, s)| {
            vec![
                (j + 1).to_string(),
                s.lattice.to_string(),
                s.form.as_ref().map_or("-".to_string(), ToString::to_string),
                s.count.to_string(),
            ]
        })
        .collect();
    let mut out = format!("fm={}\nmethod={}\n", result.total, result.method);
    out.push_str(&render(format, &["j", "gram", "form", "count"], &rows));
    Ok(out)
}

fn classnum(d: &BigInt, cap: u64) -> Outcome {
    let data = proper_classes(d, cap)?;
    if is_fundamental(d) {
        Ok(format!("h={}\n", data.h))
    } else {
        Ok(format!("h={} (form class number, D not fundamental)\n", data.h))
    }
}

fn genus(d: &BigInt, cap: u64) -> Outcome {
    let data = proper_classes(d, cap)?;
    let mut out = String::new();
    writeln!(out, "D={d}").unwrap();
    writeln!(out, "h={}", data.h).unwrap();
    for (i, c) in data.cycles.iter().enumerate() {
        let forms: Vec<String> = c.iter().map(ToString::to_string).collect();
        writeln!(out, "class {i}: {}", forms.join(" ")).unwrap();
    }
    for (g, members) in data.genus_partition.iter().enumerate() {
        let m: Vec<String> = members.iter().map(ToString::to_string).collect();
        writeln!(out, "genus {g}: classes {}", m.join(",")).unwrap();
    }
    let amb: Vec<String> = data.ambiguous_indices.iter().map(ToString::to_string).collect();
    writeln!(out, "ambiguous: {}", amb.join(",")).unwrap();
    Ok(out)
}

fn table(format: Format, list: Option<&[u64]>, cap: u64) -> Outcome {
    let primes = list.unwrap_or(&TABLE_PRIMES);
    let mut rows = Vec::new();
    for r in fm_table(primes, cap) {
        let r = r?;
        rows.push(vec![r.p.to_string(), r.h.to_string(), r.fm.to_string()]);
    }
    Ok(render(format, &["p", "h", "fm"], &rows))
}

fn scan(format: Format, max: u64, cap: u64) -> Outcome {
    let report = gauss_scan(max, cap)?;
    if format == Format::Csv {
        let rows: Vec<Vec<String>> = report
            .rows
            .iter()
            .map(|r| vec![r.p.to_string(), r.h.to_string(), r.fm.to_string()])
            .collect();
        return Ok(render(format, &["p", "h", "fm"], &rows));
    }
    let mut out = String::new();
    writeln!(out, "primes p = 1 mod 4 up to {}: {}", report.bound, report.rows.len()).unwrap();
    let ones: Vec<String> = report.fm_one.iter().map(ToString::to_string).collect();
    writeln!(out, "|FM| = 1 ({} primes): {}", ones.len(), ones.join(",")).unwrap();
    let maxima: Vec<Vec<String>> = report
        .running_max
        .iter()
        .map(|(p, m)| vec![p.to_string(), m.to_string()])
        .collect();
    writeln!(out, "running maximum of |FM|:").unwrap();
    out.push_str(&render(format, &["p", "fm"], &maxima));
    Ok(out)
}

fn glue_cmd(s_path: &Path, t_path: &Path, list: bool, cap: u64) -> Outcome {
    let s = load_lattice(s_path)?;
    let t = load_lattice(t_path)?;
    let ds = DiscriminantGroup::new(&s)?;
    let dt = DiscriminantGroup::new(&t)?;
    let antis = isometries_signed(dt.form(), ds.form(), Sign::Minus, cap)?;
    let classes = gluing_classes(&s, &t, &HodgeGroupSpec::generic(), cap)?;
    let mut out = String::new();
    writeln!(out, "gluings={}", antis.len()).unwrap();
    writeln!(out, "classes={}", classes.count).unwrap();
    if list {
        for (i, phi) in antis.iter().enumerate() {
            let l = glue(&s, &t, phi)?;
            let r = verify_overlattice(&l, &s, &t)?;
            writeln!(
                out,
                "gluing {i}: map={phi} index={} gram={} even={} unimodular={} t_primitive={} complement_is_s={} roundtrip={}",
                l.index, l.gram, r.even, r.unimodular, r.t_primitive, r.complement_is_s, r.roundtrip
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn verify_orbits(format: Format, s_path: &Path, t_path: &Path, g_order: u64, cap: u64) -> Outcome {
    let mut s_list = parse_lattice_list(&read(s_path)?)?;
    let t = load_lattice(t_path)?;
    if s_list.len() == 1 && s_list[0].rank() == 2 && s_list[0].signature() == Signature::new(1, 1) {
        s_list = rank2_genus(&s_list[0], cap)?.into_iter().map(|(l, _)| l).collect();
    }
    let report = verify_orbit_counts(&s_list, &t, &HodgeGroupSpec::new(g_order, None)?, cap)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.s.to_string(),
                r.orbits.to_string(),
                r.double_cosets.to_string(),
                if r.equal() { "yes" } else { "no" }.to_string(),
            ]
        })
        .collect();
    let mut out = render(format, &["S", "orbits", "double_cosets", "equal"], &rows);
    writeln!(
        out,
        "total orbits={} double_cosets={}",
        report.total_orbits, report.total_double_cosets
    )
    .unwrap();
    if report.all_equal() {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Mismatch(
            "gluing orbit counts differ from double coset counts".into(),
        ))
    }
}

fn run(cli: Cli) -> Outcome {
    let cap = cap_from_env()?;
    let f = cli.format;
    match cli.command {
        Command::Discform { lattice } => discform(&lattice),
        Command::Fm {
            lattice,
            rank1,
            hodge_order,
            hodge_action,
        } => {
            let hodge = hodge_spec(hodge_order, hodge_action.as_deref())?;
            fm(f, lattice.as_deref(), rank1, hodge, cap)
        }
        Command::Classnum { d } => classnum(&d, cap),
        Command::Genus { d } => genus(&d, cap),
        Command::Table { list } => table(f, list.as_deref(), cap),
        Command::Scan { max } => scan(f, max, cap),
        Command::Glue { s, t, list } => glue_cmd(&s, &t, list, cap),
        Command::VerifyOrbits { s, t, g_order } => verify_orbits(f, &s, &t, g_order, cap),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Core(e)) => {
            eprintln!("{e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}
