//! Command-line interface: exact lattice computations, discriminant
//! groups, certified isometries, Mukai-vector transforms, the monodromy
//! test and the full verification suite.
//!
//! Exit codes: 0 success/pass, 1 verification failure, 2 input error.

use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use mukai_lattice::isometry::{
    extend_from_perp, in_w, orientation_character, restrict_to_perp, word_search, Isometry,
    OrientationFrame,
};
use mukai_lattice::json::parse_int_vec;
use mukai_lattice::lattice::IntegralLattice;
use mukai_lattice::monodromy::{index_of_w, verify_index, MonodromyContext};
use mukai_lattice::mukai::{ample_elliptic, tensor_isometry, MukaiVector};
use mukai_lattice::verify;
use mukai_lattice::word::MorphismWord;

#[derive(Parser)]
#[command(
    name = "mlat",
    version,
    about = "Exact computations in the Mukai lattice: isometries, discriminant forms and monodromy tests"
)]
struct Cli {
    /// Also write the primary JSON output to this path
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Seed for the randomized property checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Depth bound for word search (at most 12)
    #[arg(long, global = true, default_value_t = 6)]
    max_len: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect lattices (built-in names: U, E8m, mukai, Lk:<k>)
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Discriminant groups and actions on them
    #[command(subcommand)]
    Disc(DiscCmd),
    /// Certified isometries
    #[command(subcommand)]
    Isom(IsomCmd),
    /// Mukai vectors and their transforms
    #[command(subcommand)]
    Mukai(MukaiCmd),
    /// Monodromy membership and the index formula
    #[command(subcommand)]
    Mon(MonCmd),
    /// Formal words of correspondences
    #[command(subcommand)]
    Word(WordCmd),
    /// Run the verification suite
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Print a lattice with its basic invariants
    Show { lattice: String },
    /// Inertia indices of the form
    Signature { lattice: String },
    /// Saturated orthogonal complement of a vector
    Perp {
        lattice: String,
        /// the vector, as a JSON array of integers
        #[arg(long)]
        v: String,
    },
}

#[derive(Subcommand)]
enum DiscCmd {
    /// Invariant factors and form values of L*/L
    Group { lattice: String },
    /// Action of an isometry on the discriminant group
    Action { lattice: String, isometry: String },
    /// Order of the orthogonal group of the rank-one discriminant form
    Oq { k: u64 },
}

#[derive(Subcommand)]
enum IsomCmd {
    /// Certify a matrix as an isometry
    Check { isometry: String },
    /// Compose two isometries (left acts second)
    Compose { left: String, right: String },
    /// Orientation character on a positive frame
    Orient {
        isometry: String,
        /// frame choice; "default" is the reduction-derived frame
        #[arg(long, default_value = "default")]
        frame: String,
    },
    /// Membership in W: orientation preserving, +-id on the discriminant group
    InW {
        isometry: String,
        #[arg(long, default_value = "default")]
        frame: String,
    },
    /// Restrict an ambient isometry to the complement of a vector
    Restrict {
        isometry: String,
        #[arg(long)]
        v: String,
    },
    /// Extend an isometry of the complement to the ambient lattice
    Extend {
        isometry: String,
        #[arg(long)]
        v: String,
        /// ambient lattice (defaults to the rank-24 Mukai lattice)
        #[arg(long, default_value = "mukai")]
        ambient: String,
    },
    /// Bounded bidirectional search for a target as a word in generators
    Search {
        target: String,
        /// generator files (repeatable)
        #[arg(long = "gen", required = true)]
        generators: Vec<String>,
    },
}

#[derive(Subcommand)]
enum MukaiCmd {
    /// Square of a Mukai vector
    Square { vector: String },
    /// Multiplicity, primitive part and half-square
    Decompose { vector: String },
    /// (r, xi, a) -> (a, -xi, r)
    FmDelta { vector: String },
    /// (r, xi, a) -> (a, xi, r)
    FmDual { vector: String },
    /// Tensor by a degree-two class
    Tensor {
        vector: String,
        /// the class, as a JSON array of 22 integers
        #[arg(long)]
        c: String,
    },
    /// The elliptic Poincare transform
    FmP { vector: String },
    /// Ample-cone test for alpha e + beta f on the elliptic plane
    Ample {
        #[arg(long)]
        alpha: i64,
        #[arg(long)]
        beta: i64,
    },
}

#[derive(Subcommand)]
enum MonCmd {
    /// Monodromy membership of an isometry of the complement
    Test {
        isometry: String,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        k: u64,
    },
    /// Index of W inside the orientation-preserving isometries
    Index { k: u64 },
    /// Check the index formula against the brute-force unit count
    VerifyIndex {
        #[arg(long, default_value_t = 500)]
        max: u64,
    },
    /// Generator sample for the monodromy group
    Generators {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        k: u64,
    },
}

#[derive(Subcommand)]
enum WordCmd {
    /// Check a word and print its vector chain
    Validate { word: String },
    /// Evaluate a word to an isometry
    Eval {
        word: String,
        /// phi_tilde: ambient; phi: sign-twisted restriction; pt: parallel transport
        #[arg(long, default_value = "phi_tilde")]
        functor: String,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// "all" or a comma-separated list of check ids
    #[arg(long, default_value = "all")]
    suite: String,
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {:#}", err);
            std::process::exit(2);
        }
    }
}

fn load_lattice(arg: &str) -> anyhow::Result<IntegralLattice> {
    if let Ok(l) = IntegralLattice::by_name(arg) {
        return Ok(l);
    }
    let text =
        std::fs::read_to_string(arg).with_context(|| format!("cannot read lattice {:?}", arg))?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse lattice {:?}", arg))
}

fn load_isometry(arg: &str) -> anyhow::Result<Isometry> {
    let text =
        std::fs::read_to_string(arg).with_context(|| format!("cannot read isometry {:?}", arg))?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse isometry {:?}", arg))
}

fn load_word(arg: &str) -> anyhow::Result<MorphismWord> {
    let text =
        std::fs::read_to_string(arg).with_context(|| format!("cannot read word {:?}", arg))?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse word {:?}", arg))
}

/// A vector argument: inline JSON, either an array of ambient coordinates
/// or a Mukai triple.
fn parse_vector(text: &str, expected_len: usize) -> anyhow::Result<Vec<BigInt>> {
    if text.trim_start().starts_with('{') {
        let v: MukaiVector = serde_json::from_str(text).context("cannot parse Mukai vector")?;
        return Ok(v.coords());
    }
    let v = parse_int_vec(text).context("cannot parse vector")?;
    if v.len() != expected_len {
        return Err(anyhow!("vector has length {}, expected {}", v.len(), expected_len));
    }
    Ok(v)
}

fn parse_mukai_vector(text: &str) -> anyhow::Result<MukaiVector> {
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text).context("cannot parse Mukai vector");
    }
    let coords = parse_int_vec(text).context("cannot parse vector")?;
    MukaiVector::from_coords(&coords).map_err(|e| anyhow!(e))
}

fn emit(cli: &Cli, value: &serde_json::Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    println!("{}", text);
    if let Some(path) = &cli.json {
        std::fs::write(path, text.as_bytes())
            .with_context(|| format!("cannot write {:?}", path))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<i32> {
    match &cli.command {
        Command::Lattice(cmd) => run_lattice(cli, cmd),
        Command::Disc(cmd) => run_disc(cli, cmd),
        Command::Isom(cmd) => run_isom(cli, cmd),
        Command::Mukai(cmd) => run_mukai(cli, cmd),
        Command::Mon(cmd) => run_mon(cli, cmd),
        Command::Word(cmd) => run_word(cli, cmd),
        Command::Verify(args) => run_verify(cli, args),
    }
}

fn run_lattice(cli: &Cli, cmd: &LatticeCmd) -> anyhow::Result<i32> {
    match cmd {
        LatticeCmd::Show { lattice } => {
            let l = load_lattice(lattice)?;
            let (p, n) = l.signature().map_err(|e| anyhow!(e))?;
            emit(
                cli,
                &serde_json::json!({
                    "lattice": serde_json::to_value(&l)?,
                    "rank": l.rank(),
                    "det": l.det().to_string(),
                    "even": l.is_even(),
                    "signature": [p, n],
                }),
            )?;
            Ok(0)
        }
        LatticeCmd::Signature { lattice } => {
            let l = load_lattice(lattice)?;
            let (p, n) = l.signature().map_err(|e| anyhow!(e))?;
            emit(cli, &serde_json::json!({ "positive": p, "negative": n }))?;
            Ok(0)
        }
        LatticeCmd::Perp { lattice, v } => {
            let l = load_lattice(lattice)?;
            let vec = parse_vector(v, l.rank())?;
            let perp = l.perp_basis(&vec).map_err(|e| anyhow!(e))?;
            let induced = IntegralLattice::new(None, perp.induced_gram().clone()).ok();
            emit(
                cli,
                &serde_json::json!({
                    "rank": perp.rank(),
                    "degenerate": perp.is_degenerate(),
                    "columns": serde_json::to_value(mukai_lattice::json::mat_to_repr(perp.columns()))?,
                    "induced": induced.map(|i| serde_json::to_value(&i).unwrap()),
                }),
            )?;
            Ok(0)
        }
    }
}

fn run_disc(cli: &Cli, cmd: &DiscCmd) -> anyhow::Result<i32> {
    match cmd {
        DiscCmd::Group { lattice } => {
            let l = load_lattice(lattice)?;
            let d = mukai_lattice::disc::DiscriminantGroup::of(&l).map_err(|e| anyhow!(e))?;
            emit(
                cli,
                &serde_json::json!({
                    "factors": d.invariant_factors().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "order": d.order().to_string(),
                    "q_values": d.q_values().iter().map(|q| q.to_string()).collect::<Vec<_>>(),
                }),
            )?;
            Ok(0)
        }
        DiscCmd::Action { lattice, isometry } => {
            let l = load_lattice(lattice)?;
            let g = load_isometry(isometry)?;
            if l.gram() != g.lattice().gram() {
                return Err(anyhow!("the isometry does not live on the given lattice"));
            }
            let d = mukai_lattice::disc::DiscriminantGroup::of(g.lattice())
                .map_err(|e| anyhow!(e))?;
            let action = d.action_of(&g).map_err(|e| anyhow!(e))?;
            emit(
                cli,
                &serde_json::json!({
                    "factors": d.invariant_factors().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "sign_class": serde_json::to_value(action.sign_class())?,
                    "matrix": serde_json::to_value(mukai_lattice::json::mat_to_repr(action.matrix()))?,
                }),
            )?;
            Ok(0)
        }
        DiscCmd::Oq { k } => {
            let count = mukai_lattice::disc::oq_unit_count(*k).map_err(|e| anyhow!(e))?;
            emit(cli, &serde_json::json!({ "k": k, "count": count }))?;
            Ok(0)
        }
    }
}

fn resolve_frame(name: &str, g: &Isometry) -> anyhow::Result<OrientationFrame> {
    match name {
        "default" => OrientationFrame::default_for(g.lattice().clone()).map_err(|e| anyhow!(e)),
        other => Err(anyhow!("unknown frame {:?}; only \"default\" is available", other)),
    }
}

fn run_isom(cli: &Cli, cmd: &IsomCmd) -> anyhow::Result<i32> {
    match cmd {
        IsomCmd::Check { isometry } => {
            // parse permissively so a failed certification is a verdict,
            // not an input error
            let text = std::fs::read_to_string(isometry)
                .with_context(|| format!("cannot read isometry {:?}", isometry))?;
            let value: serde_json::Value =
                serde_json::from_str(&text).context("cannot parse isometry JSON")?;
            let lattice = match value.get("lattice") {
                Some(serde_json::Value::String(name)) => {
                    IntegralLattice::by_name(name).map_err(|e| anyhow!(e))?
                }
                Some(other) => serde_json::from_value(other.clone())
                    .context("cannot parse inline lattice")?,
                None => return Err(anyhow!("isometry JSON needs a field: lattice")),
            };
            let matrix = value
                .get("matrix")
                .cloned()
                .ok_or_else(|| anyhow!("isometry JSON needs a field: matrix"))?;
            let rows: Vec<Vec<mukai_lattice::json::JsonInt>> =
                serde_json::from_value(matrix).context("cannot parse matrix")?;
            let matrix = mukai_lattice::json::mat_from_repr(rows).map_err(|e| anyhow!(e))?;
            match Isometry::certify(lattice, matrix) {
                Ok(_) => {
                    emit(cli, &serde_json::json!({ "ok": true }))?;
                    Ok(0)
                }
                Err(e) => {
                    emit(cli, &serde_json::json!({ "ok": false, "reason": e.to_string() }))?;
                    Ok(1)
                }
            }
        }
        IsomCmd::Compose { left, right } => {
            let a = load_isometry(left)?;
            let b = load_isometry(right)?;
            let c = a.compose(&b).map_err(|e| anyhow!(e))?;
            emit(cli, &serde_json::to_value(&c)?)?;
            Ok(0)
        }
        IsomCmd::Orient { isometry, frame } => {
            let g = load_isometry(isometry)?;
            let frame = resolve_frame(frame, &g)?;
            let or = orientation_character(&g, &frame).map_err(|e| anyhow!(e))?;
            emit(cli, &serde_json::json!({ "orientation": serde_json::to_value(or)? }))?;
            Ok(0)
        }
        IsomCmd::InW { isometry, frame } => {
            let g = load_isometry(isometry)?;
            let frame = resolve_frame(frame, &g)?;
            let verdict = in_w(&g, &frame).map_err(|e| anyhow!(e))?;
            emit(cli, &serde_json::json!({ "in_w": verdict }))?;
            Ok(0)
        }
        IsomCmd::Restrict { isometry, v } => {
            let g = load_isometry(isometry)?;
            let vec = parse_vector(v, g.lattice().rank())?;
            let restricted = restrict_to_perp(&g, &vec).map_err(|e| anyhow!(e))?;
            emit(cli, &serde_json::to_value(&restricted)?)?;
            Ok(0)
        }
        IsomCmd::Extend { isometry, v, ambient } => {
            let g = load_isometry(isometry)?;
            let ambient = std::sync::Arc::new(load_lattice(ambient)?);
            let vec = parse_vector(v, ambient.rank())?;
            match extend_from_perp(&ambient, &vec, &g) {
                Ok((ext, eps)) => {
                    emit(
                        cli,
                        &serde_json::json!({
                            "extended": serde_json::to_value(&ext)?,
                            "epsilon": eps,
                        }),
                    )?;
                    Ok(0)
                }
                Err(mukai_lattice::Error::NotInW) => {
                    emit(cli, &serde_json::json!({ "extended": null, "reason": "not in W" }))?;
                    Ok(1)
                }
                Err(e) => Err(anyhow!(e)),
            }
        }
        IsomCmd::Search { target, generators } => {
            let target = load_isometry(target)?;
            let gens: Vec<Isometry> = generators
                .iter()
                .map(|g| load_isometry(g))
                .collect::<anyhow::Result<_>>()?;
            let word = word_search(&gens, &target, cli.max_len).map_err(|e| anyhow!(e))?;
            emit(cli, &serde_json::json!({ "word": serde_json::to_value(&word)? }))?;
            Ok(if word.is_some() { 0 } else { 1 })
        }
    }
}

fn run_mukai(cli: &Cli, cmd: &MukaiCmd) -> anyhow::Result<i32> {
    match cmd {
        MukaiCmd::Square { vector } => {
            let v = parse_mukai_vector(vector)?;
            emit(cli, &serde_json::json!({ "square": v.square().to_string() }))?;
            Ok(0)
        }
        MukaiCmd::Decompose { vector } => {
            let v = parse_mukai_vector(vector)?;
            let t = v.mk_decompose().map_err(|e| anyhow!(e))?;
            emit(
                cli,
                &serde_json::json!({
                    "m": t.m.to_string(),
                    "w": serde_json::to_value(&t.w)?,
                    "k": t.k.to_string(),
                }),
            )?;
            Ok(0)
        }
        MukaiCmd::FmDelta { vector } => {
            let v = parse_mukai_vector(vector)?;
            emit(cli, &serde_json::to_value(v.fm_delta())?)?;
            Ok(0)
        }
        MukaiCmd::FmDual { vector } => {
            let v = parse_mukai_vector(vector)?;
            emit(cli, &serde_json::to_value(v.fm_dual())?)?;
            Ok(0)
        }
        MukaiCmd::Tensor { vector, c } => {
            let v = parse_mukai_vector(vector)?;
            let class = parse_int_vec(c).map_err(|e| anyhow!(e))?;
            // the matrix form certifies the class as well
            tensor_isometry(&class).map_err(|e| anyhow!(e))?;
            emit(cli, &serde_json::to_value(v.tensor(&class).map_err(|e| anyhow!(e))?)?)?;
            Ok(0)
        }
        MukaiCmd::FmP { vector } => {
            let v = parse_mukai_vector(vector)?;
            emit(cli, &serde_json::to_value(v.fm_poincare())?)?;
            Ok(0)
        }
        MukaiCmd::Ample { alpha, beta } => {
            let verdict = ample_elliptic(&BigInt::from(*alpha), &BigInt::from(*beta))
                .map_err(|e| anyhow!(e))?;
            emit(cli, &serde_json::json!({ "ample": verdict }))?;
            Ok(0)
        }
    }
}

fn run_mon(cli: &Cli, cmd: &MonCmd) -> anyhow::Result<i32> {
    match cmd {
        MonCmd::Test { isometry, m, k } => {
            let g = load_isometry(isometry)?;
            let ctx = MonodromyContext::new(*m, *k).map_err(|e| anyhow!(e))?;
            let verdict = ctx.is_monodromy(&g).map_err(|e| anyhow!(e))?;
            emit(cli, &serde_json::json!({ "monodromy": verdict }))?;
            Ok(0)
        }
        MonCmd::Index { k } => {
            let index = index_of_w(*k).map_err(|e| anyhow!(e))?;
            println!("{}", index);
            if let Some(path) = &cli.json {
                std::fs::write(
                    path,
                    serde_json::to_string_pretty(&serde_json::json!({ "k": k, "index": index }))?,
                )?;
            }
            Ok(0)
        }
        MonCmd::VerifyIndex { max } => {
            let mismatches = verify_index(*max).map_err(|e| anyhow!(e))?;
            let ok = mismatches.is_empty();
            emit(cli, &serde_json::json!({ "max": max, "mismatches": mismatches }))?;
            Ok(if ok { 0 } else { 1 })
        }
        MonCmd::Generators { m, k } => {
            let ctx = MonodromyContext::new(*m, *k).map_err(|e| anyhow!(e))?;
            let gens = ctx.generators().map_err(|e| anyhow!(e))?;
            emit(
                cli,
                &serde_json::json!({
                    "count": gens.len(),
                    "generators": serde_json::to_value(&gens)?,
                }),
            )?;
            Ok(0)
        }
    }
}

fn run_word(cli: &Cli, cmd: &WordCmd) -> anyhow::Result<i32> {
    match cmd {
        WordCmd::Validate { word } => {
            let w = load_word(word)?;
            match w.validate() {
                Ok(chain) => {
                    emit(
                        cli,
                        &serde_json::json!({
                            "valid": true,
                            "chain": serde_json::to_value(&chain)?,
                            "reduced_length": w.reduced().steps.len(),
                        }),
                    )?;
                    Ok(0)
                }
                Err(e) => {
                    emit(cli, &serde_json::json!({ "valid": false, "reason": e.to_string() }))?;
                    Ok(1)
                }
            }
        }
        WordCmd::Eval { word, functor } => {
            let w = load_word(word)?;
            match functor.as_str() {
                "phi_tilde" => {
                    let iso = w.eval_ambient().map_err(|e| anyhow!(e))?;
                    emit(cli, &serde_json::to_value(&iso)?)?;
                    Ok(0)
                }
                "phi" | "pt" => {
                    let ev = w.eval_restricted().map_err(|e| anyhow!(e))?;
                    emit(
                        cli,
                        &serde_json::json!({
                            "functor": functor,
                            "source": serde_json::to_value(&ev.source)?,
                            "target": serde_json::to_value(&ev.target)?,
                            "sign": serde_json::to_value(ev.sign)?,
                            "loop": ev.is_loop(),
                            "matrix": serde_json::to_value(mukai_lattice::json::mat_to_repr(&ev.matrix))?,
                        }),
                    )?;
                    Ok(0)
                }
                other => Err(anyhow!("unknown functor {:?} (phi_tilde, phi, pt)", other)),
            }
        }
    }
}

fn run_verify(cli: &Cli, args: &VerifyArgs) -> anyhow::Result<i32> {
    let ids: Option<Vec<String>> = if args.suite == "all" {
        None
    } else {
        Some(args.suite.split(',').map(|s| s.trim().to_string()).collect())
    };
    let report = verify::run(ids.as_deref(), cli.seed).map_err(|e| anyhow!(e))?;
    for check in &report.checks {
        let label = match check.status {
            verify::Status::Pass => "pass",
            verify::Status::Fail => "FAIL",
        };
        println!("{}  {}  ({} ms)", label, check.id, check.millis);
    }
    let text = serde_json::to_string_pretty(&report)?;
    if let Some(path) = &cli.json {
        std::fs::write(path, text.as_bytes())
            .with_context(|| format!("cannot write {:?}", path))?;
    }
    Ok(if report.all_passed() { 0 } else { 1 })
}
