//! Command-line front end.

mod io;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::grids::{
    hermitian_grid, hermitian_to_matrix_units, random_signed_permutation, rectangular_grid, spin_grid,
    spin_system, symplectic_grid, symplectic_to_matrix_units, verify_grid, Grid,
    GridKind, MatrixUnits,
};
use crate::hnk::{
    build_hnk, diag_hnk, diag_rect, peirce_split, projection_report, rect_split, trace_formula_exact,
    verify_hnk, verify_hnk_uij, verify_uij_grid, RankOneRealization,
};
use crate::numlin::{ExactMatrix, ExactScalar};
use crate::opspace::{cb_separation, Witness};
use crate::report::{CheckStatus, VerificationReport};

pub use io::{parse_scalar, Document, ElementJson, IndexJson, MatrixJson};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "cartan-grids", version, about = "Construct and verify grids, H_n^k spaces and their witnesses")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Pretty, global = true)]
    format: Format,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the elements of a grid or space.
    Construct {
        #[command(subcommand)]
        object: Object,
    },
    /// Run a verification suite.
    Verify {
        #[command(subcommand)]
        target: Target,
    },
    /// Row and column witnesses separating H_n^k from R_n and C_n.
    Witness {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand, Debug, Clone)]
enum Object {
    Hnk {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    Rectangular {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
    },
    Hermitian {
        #[arg(long)]
        m: usize,
    },
    Symplectic {
        #[arg(long)]
        m: usize,
    },
    Spin {
        /// Number of pairs `u_j, ũ_j`.
        #[arg(long)]
        r: usize,
        /// Include `u_0`.
        #[arg(long)]
        odd: bool,
    },
    SpinSystem {
        #[arg(long)]
        k: usize,
    },
    DiagHnk {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        ks: Vec<usize>,
    },
    DiagRect {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Target {
    /// Grid axioms of a constructed object or of a saved document.
    Grid {
        #[command(subcommand)]
        object: Option<Object>,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Invariants, grid axioms, indices and support sums of H_n^k.
    Hnk(NkArgs),
    /// The u_IJ grid of a rank-one realization.
    UijGrid {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Idempotence, exactness and contractivity of the projection onto H_n^k.
    Projection {
        #[command(flatten)]
        nk: NkArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Trace norm of a combination of the H_n^k basis.
    Trace {
        #[command(flatten)]
        nk: NkArgs,
        /// Coefficients such as `1,-1/2,2i`; defaults to the first basis vector.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Vec<String>,
    },
    /// Peirce splitting of Diag(H_n^k1, ...) or Diag(B(H,K), B(K,H)).
    Split {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        ks: Vec<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Matrix units from a hermitian or symplectic grid.
    MatrixUnits {
        #[arg(long, value_enum)]
        kind: UnitsKind,
        #[arg(long)]
        m: usize,
        /// Conjugate the grid by random signed permutations first.
        #[arg(long)]
        conjugate: bool,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct NkArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum UnitsKind {
    Hermitian,
    Symplectic,
}

/// Parses `args` (including the program name), writes to `out` and `err`
/// and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return if code == 0 { EXIT_PASS } else { EXIT_USAGE };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Capacity(_) => EXIT_CAPACITY,
                Error::InvalidArgument(_) | Error::Dimension { .. } => EXIT_USAGE,
                _ => EXIT_FAIL,
            }
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Construct { object } => {
            let doc = construct(object)?;
            emit_document(&doc, cli.format, out)?;
            Ok(EXIT_PASS)
        }
        Command::Verify { target } => {
            let report = verify(target, cli.seed)?;
            emit_report(&report, cli.format, out)?;
            Ok(if report.passed() { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Witness { n, k } => witness(*n, *k, cli.format, out),
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::InvalidArgument(format!("cannot write output: {e}")))
}

fn element(name: String, label: Option<crate::grids::GridIndex>, m: &ExactMatrix) -> ElementJson {
    ElementJson {
        name,
        label,
        matrix: MatrixJson::from(m),
    }
}

fn grid_document(object: &str, params: serde_json::Value, g: &Grid) -> Document {
    Document {
        object: object.into(),
        params,
        grid: Some(g.kind()),
        index: None,
        elements: g
            .iter()
            .map(|(l, u)| element(l.to_string(), Some(*l), u.mat()))
            .collect(),
    }
}

fn rank_one_document(object: &str, params: serde_json::Value, real: &RankOneRealization) -> Result<Document> {
    Ok(grid_document(object, params, &real.grid()?))
}

fn construct(object: &Object) -> Result<Document> {
    Ok(match object.clone() {
        Object::Hnk { n, k } => {
            let h = build_hnk(n, k)?;
            let mut doc = rank_one_document(
                "hnk",
                json!({"n": n, "k": k, "multiplicity": h.multiplicity()}),
                h.realization(),
            )?;
            doc.index = Some(IndexJson {
                rows: h.rows().iter().map(|c| c.members().to_vec()).collect(),
                cols: h.cols().iter().map(|c| c.members().to_vec()).collect(),
            });
            doc
        }
        Object::Rectangular { rows, cols } => {
            grid_document("rectangular", json!({"rows": rows, "cols": cols}), &rectangular_grid(rows, cols)?)
        }
        Object::Hermitian { m } => grid_document("hermitian", json!({"m": m}), &hermitian_grid(m)?),
        Object::Symplectic { m } => grid_document("symplectic", json!({"m": m}), &symplectic_grid(m)?),
        Object::Spin { r, odd } => grid_document("spin", json!({"r": r, "odd": odd}), &spin_grid(r, odd)?),
        Object::SpinSystem { k } => Document {
            object: "spin-system".into(),
            params: json!({"k": k}),
            grid: None,
            index: None,
            elements: spin_system(k)?
                .iter()
                .enumerate()
                .map(|(j, s)| element(format!("s_{}", j + 1), None, s))
                .collect(),
        },
        Object::DiagHnk { n, ks } => rank_one_document("diag-hnk", json!({"n": n, "ks": ks}), &diag_hnk(n, &ks)?)?,
        Object::DiagRect { p, q } => grid_document("diag-rect", json!({"p": p, "q": q}), &diag_rect(p, q)?),
    })
}

fn emit_document(doc: &Document, format: Format, out: &mut dyn Write) -> Result<()> {
    let text = match format {
        Format::Json => to_json(doc)?,
        Format::Csv => {
            let mut s = String::from("element,row,col,re,im\n");
            for (e, m) in doc.elements.iter().zip(doc.matrices()?) {
                s.push_str(&io::csv_rows(&e.name, &m));
            }
            s
        }
        Format::Pretty => {
            let mut s = format!("{} {}\n", doc.object, doc.params);
            if let Some(index) = &doc.index {
                let sets = |v: &[Vec<usize>]| {
                    v.iter()
                        .map(|c| format!("{{{}}}", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                s.push_str(&format!("rows: {}\ncols: {}\n", sets(&index.rows), sets(&index.cols)));
            }
            for (e, m) in doc.elements.iter().zip(doc.matrices()?) {
                s.push_str(&format!("\n{} =\n{}", e.name, io::pretty_matrix(&m)));
            }
            s
        }
    };
    write_out(out, &text)
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidArgument(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn emit_report(report: &VerificationReport, format: Format, out: &mut dyn Write) -> Result<()> {
    let text = match format {
        Format::Json => to_json(&report.to_json())?,
        Format::Csv => {
            let mut s = String::from("check,status,residual,detail\n");
            for c in &report.checks {
                let status = match c.status {
                    CheckStatus::Pass => "pass",
                    CheckStatus::Fail => "fail",
                    CheckStatus::Flagged => "flagged",
                };
                s.push_str(&format!(
                    "\"{}\",{status},{:.16e},\"{}\"\n",
                    c.name.replace('"', "\"\""),
                    c.residual,
                    c.detail.replace('"', "\"\"")
                ));
            }
            s
        }
        Format::Pretty => report.to_string(),
    };
    write_out(out, &text)
}

fn load(path: &PathBuf) -> Result<Document> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn document_grid(doc: &Document) -> Result<Grid> {
    let kind = doc
        .grid
        .ok_or_else(|| Error::InvalidArgument(format!("a {} document is not a grid", doc.object)))?;
    let members = doc
        .elements
        .iter()
        .map(|e| {
            let label = e
                .label
                .ok_or_else(|| Error::InvalidArgument(format!("element {} has no label", e.name)))?;
            Ok((label, ExactMatrix::try_from(&e.matrix)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Grid::new(kind, members)
}

fn document_realization(doc: &Document) -> Result<RankOneRealization> {
    RankOneRealization::new(doc.matrices()?)
}

fn either<T>(input: &Option<PathBuf>, built: Option<T>, what: &str) -> Result<Option<T>> {
    match (input, built) {
        (Some(_), Some(_)) => Err(Error::InvalidArgument(format!("give either --input or {what}, not both"))),
        (None, None) => Err(Error::InvalidArgument(format!("give --input or {what}"))),
        (_, b) => Ok(b),
    }
}

fn verify(target: &Target, seed: u64) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match target {
        Target::Grid { object, input } => {
            let doc = match either(input, object.as_ref(), "an object")? {
                Some(o) => construct(o)?,
                None => load(input.as_ref().expect("checked"))?,
            };
            Ok(verify_grid(&document_grid(&doc)?))
        }
        Target::Hnk(NkArgs { n, k }) => verify_hnk(&build_hnk(*n, *k)?),
        Target::UijGrid { n, k, input } => {
            let nk = match (n, k) {
                (Some(n), Some(k)) => Some((*n, *k)),
                (None, None) => None,
                _ => return Err(Error::InvalidArgument("give both --n and --k".into())),
            };
            match either(input, nk, "--n/--k")? {
                Some((n, k)) => verify_hnk_uij(&build_hnk(n, k)?),
                None => verify_uij_grid(&document_realization(&load(input.as_ref().expect("checked"))?)?),
            }
        }
        Target::Projection { nk, samples } => projection_report(&build_hnk(nk.n, nk.k)?, *samples, &mut rng),
        Target::Trace { nk, coeffs } => {
            let space = build_hnk(nk.n, nk.k)?;
            let a = if coeffs.is_empty() {
                (0..nk.n)
                    .map(|i| if i == 0 { ExactScalar::one() } else { ExactScalar::zero() })
                    .collect()
            } else {
                coeffs.iter().map(|c| parse_scalar(c)).collect::<Result<Vec<_>>>()?
            };
            let t = trace_formula_exact(&space, &a)?;
            Ok(t.report)
        }
        Target::Split { n, ks, p, q, input } => {
            if let Some(path) = input {
                if n.is_some() || !ks.is_empty() || p.is_some() || q.is_some() {
                    return Err(Error::InvalidArgument("give either --input or parameters, not both".into()));
                }
                let doc = load(path)?;
                return match doc.grid {
                    Some(GridKind::Rectangular { .. }) => Ok(rect_split(&document_grid(&doc)?)?.report),
                    _ => Ok(peirce_split(&document_realization(&doc)?)?.report),
                };
            }
            match (n, ks.is_empty(), p, q) {
                (Some(n), false, None, None) => Ok(peirce_split(&diag_hnk(*n, ks)?)?.report),
                (None, true, Some(p), Some(q)) => Ok(rect_split(&diag_rect(*p, *q)?)?.report),
                _ => Err(Error::InvalidArgument(
                    "give --n with --ks for Diag(H_n^k...), or --p with --q for Diag(B(H,K), B(K,H))".into(),
                )),
            }
        }
        Target::MatrixUnits { kind, m, conjugate } => {
            let g = match kind {
                UnitsKind::Hermitian => hermitian_grid(*m)?,
                UnitsKind::Symplectic => symplectic_grid(*m)?,
            };
            let transform = |g: &Grid| -> Result<MatrixUnits> {
                match kind {
                    UnitsKind::Hermitian => hermitian_to_matrix_units(g),
                    UnitsKind::Symplectic => symplectic_to_matrix_units(g),
                }
            };
            if !conjugate {
                return Ok(transform(&g)?.report);
            }
            let left = random_signed_permutation(*m, &mut rng);
            let right = random_signed_permutation(*m, &mut rng);
            let mu = transform(&g.conjugate(&left, &right)?)?;
            let mut report = mu.report.clone();
            let mut bad = Vec::new();
            for i in 1..=*m {
                for j in 1..=*m {
                    let want = &(&left * &ExactMatrix::unit(*m, *m, i - 1, j - 1)) * &right;
                    if mu.e(i, j) != &want {
                        bad.push(format!("e_{i}{j}"));
                    }
                }
            }
            report.push(crate::report::Check::tally("natural under conjugation", bad, m * m));
            Ok(report)
        }
    }
}

fn witness_json(w: &Witness) -> serde_json::Value {
    json!({
        "target": w.target,
        "norm": w.norm,
        "image_norm": w.image_norm,
        "ratio": w.ratio,
        "element": MatrixJson::from(&w.element),
        "image": MatrixJson::from(&w.image),
    })
}

fn witness(n: usize, k: usize, format: Format, out: &mut dyn Write) -> Result<i32> {
    let s = cb_separation(n, k)?;
    let text = match format {
        Format::Json => to_json(&json!({
            "n": n,
            "k": k,
            "row": witness_json(&s.row),
            "col": witness_json(&s.col),
            "report": s.report.to_json(),
        }))?,
        Format::Csv => {
            let mut t = String::from("witness,target,norm,image_norm,ratio\n");
            for (name, w) in [("row", &s.row), ("column", &s.col)] {
                t.push_str(&format!(
                    "{name},{},{:.16e},{:.16e},{:.16e}\n",
                    w.target, w.norm, w.image_norm, w.ratio
                ));
            }
            t
        }
        Format::Pretty => {
            let mut t = String::new();
            for (name, w) in [("row", &s.row), ("column", &s.col)] {
                let verdict = if w.ratio > 1.0 + crate::opspace::WITNESS_TOL {
                    format!("no isometry onto {} is a complete contraction", w.target)
                } else {
                    "no separation".to_string()
                };
                t.push_str(&format!(
                    "{name} witness in H_{n}^{k}: norm {:.8}\n{}image in {}: norm {:.8}\n{}ratio {:.8}: {verdict}\n\n",
                    w.norm,
                    io::pretty_matrix(&w.element),
                    w.target,
                    w.image_norm,
                    io::pretty_matrix(&w.image),
                    w.ratio,
                ));
            }
            t.push_str(&s.report.to_string());
            t
        }
    };
    write_out(out, &text)?;
    Ok(if s.report.passed() { EXIT_PASS } else { EXIT_FAIL })
}
