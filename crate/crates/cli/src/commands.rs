use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dsemi_core::flat::{chevalley_image, flat_image, reduce, residue_morphism, special_to_residue, ChevalleyBudget, SpecialSet};
use dsemi_core::formats::{parse_admissible_map, parse_blowup, parse_datum, parse_registry, MapFile};
use dsemi_core::grobner::{buchberger, elimination_ideal, saturate};
use dsemi_core::normal::{basic_union_formula, positivize, substitute_one, to_basic_union};
use dsemi_core::osgood;
use dsemi_core::parse::format_point;
use dsemi_core::semantics::{check_agreement, env_from, eval_formula, exists_check, ExistsOutcome, Report, Status, Verdict};
use dsemi_core::transforms::{
    chart_map, d_eliminate_phq, d_eliminate_qhp, graph_encode, image_off_center, pullback_to_chart, qe_pipeline,
    BlowupSpec, PipelineConfig,
};
use dsemi_core::{
    parse_formula, parse_point, parse_term, Formula, GbBudget, KPoly, MPoly, MonomialOrder, OracleConfig,
    SeriesRegistry, Term,
};

use crate::error::CliError;
use crate::{Cli, Command, DivCase, Facts, Opts, Order};

/// Text of an argument: the file contents if it names a file, else the argument itself.
struct Input {
    text: String,
    origin: String,
    dir: Option<PathBuf>,
}

fn load(arg: &str) -> Result<Input, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{arg}: {e}")))?;
        Ok(Input {
            text,
            origin: arg.to_string(),
            dir: path.parent().map(Path::to_path_buf),
        })
    } else {
        Ok(Input {
            text: arg.to_string(),
            origin: "argument".to_string(),
            dir: None,
        })
    }
}

struct Ctx {
    reg: SeriesRegistry,
    cfg: OracleConfig,
    out: String,
}

impl Ctx {
    fn new(opts: &Opts) -> Result<Self, CliError> {
        let reg = match &opts.series {
            Some(p) => {
                let origin = p.display().to_string();
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{origin}: {e}")))?;
                parse_registry(&text).map_err(|e| CliError::input(&origin, e))?
            }
            None => SeriesRegistry::with_builtins(),
        };
        if opts.precision < 1 || opts.max_precision < opts.precision {
            return Err(CliError::Usage("need 1 <= --precision <= --max-precision".into()));
        }
        let cfg = OracleConfig {
            samples: opts.samples,
            seed: opts.seed,
            start_precision: opts.precision,
            max_precision: opts.max_precision,
            ..OracleConfig::default()
        };
        Ok(Ctx { reg, cfg, out: String::new() })
    }

    fn formula(&self, arg: &str) -> Result<Formula, CliError> {
        let inp = load(arg)?;
        parse_formula(&inp.text, &self.reg).map_err(|e| CliError::input(&inp.origin, e))
    }

    fn term(&self, arg: &str) -> Result<Term, CliError> {
        let inp = load(arg)?;
        parse_term(&inp.text, &self.reg).map_err(|e| CliError::input(&inp.origin, e))
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }

    /// Prints a formula after checking that it parses back to itself.
    fn emit(&mut self, label: &str, f: &Formula) -> Result<(), CliError> {
        let text = f.to_string();
        match parse_formula(&text, &self.reg) {
            Ok(g) if g == *f => {}
            Ok(g) if g.to_string() == text => {}
            Ok(_) => return Err(CliError::RoundTrip(text)),
            Err(e) => return Err(CliError::RoundTrip(format!("{text}: {e}"))),
        }
        self.line(format!("{label} {text}"));
        Ok(())
    }

    fn emit_term(&mut self, label: &str, t: &Term) -> Result<(), CliError> {
        let text = t.to_string();
        if parse_term(&text, &self.reg).is_err() {
            return Err(CliError::RoundTrip(text));
        }
        self.line(format!("{label} {text}"));
        Ok(())
    }

    fn report(&mut self, r: &Report) -> u8 {
        let _ = writeln!(self.out, "{r}");
        match r.status() {
            Status::Pass => 0,
            Status::Counterexample => 1,
            Status::PrecisionExhausted => 2,
        }
    }

    fn compare(&mut self, ours: &Formula, other: &Formula) -> Result<u8, CliError> {
        let r = check_agreement(ours, other, &self.cfg).map_err(dsemi_core::Error::from)?;
        Ok(self.report(&r))
    }
}

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let mut ctx = Ctx::new(&cli.opts)?;
    let code = dispatch(&mut ctx, &cli.command)?;
    match &cli.opts.out {
        Some(p) => std::fs::write(p, &ctx.out).map_err(|e| CliError::Output {
            path: p.display().to_string(),
            msg: e.to_string(),
        })?,
        None => print!("{}", ctx.out),
    }
    Ok(code)
}

fn engine<T, E: Into<dsemi_core::Error>>(r: Result<T, E>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Engine(e.into()))
}

fn dispatch(ctx: &mut Ctx, cmd: &Command) -> Result<u8, CliError> {
    match cmd {
        Command::Eval {
            formula,
            point,
            vars,
            hint,
            witness_budget,
        } => eval(ctx, formula, point, vars, hint, *witness_budget),
        Command::CheckEquiv { left, right } => {
            let (a, b) = (ctx.formula(left)?, ctx.formula(right)?);
            ctx.compare(&a, &b)
        }
        Command::Positivize { formula } => {
            let f = ctx.formula(formula)?;
            let g = engine(positivize(&f))?;
            ctx.emit("formula", &g)?;
            ctx.compare(&g, &f)
        }
        Command::BasicUnion { formula, size_cap } => {
            let f = ctx.formula(formula)?;
            let g = basic_union_formula(&engine(to_basic_union(&f, *size_cap))?);
            ctx.emit("formula", &g)?;
            ctx.compare(&g, &f)
        }
        Command::BlowupCharts { blowup } => {
            let spec = load_blowup(ctx, blowup)?;
            for j in 1..=spec.arity() {
                let c = engine(chart_map(&spec, j))?;
                ctx.line(format!("chart {j}"));
                ctx.line(format!("coordinates {}", c.coordinates.join(" ")));
                for r in &c.relations {
                    ctx.emit("relation", r)?;
                }
                for (v, t) in &c.solved {
                    ctx.emit_term(&format!("solved {v} ="), t)?;
                }
            }
            Ok(0)
        }
        Command::Pullback { formula, blowup, chart } => {
            let spec = load_blowup(ctx, blowup)?;
            let f = ctx.formula(formula)?;
            let g = engine(pullback_to_chart(&f, &spec, *chart))?;
            ctx.emit("formula", &g)?;
            Ok(0)
        }
        Command::ImageOffCenter { blowup, charts } => {
            let spec = load_blowup(ctx, blowup)?;
            let fs = charts.iter().map(|c| ctx.formula(c)).collect::<Result<Vec<_>, _>>()?;
            let g = engine(image_off_center(&spec, &fs))?;
            ctx.emit("formula", &g)?;
            Ok(0)
        }
        Command::GraphEncode { basic } => {
            let f = ctx.formula(basic)?;
            let atoms = match f {
                Formula::And(parts) => parts,
                atom => vec![atom],
            };
            let enc = engine(graph_encode(&atoms))?;
            ctx.line(format!("z {}", enc.z_vars.join(" ")));
            for e in &enc.equations {
                ctx.emit_term("equation", e)?;
            }
            ctx.emit("constraint", &enc.constraint)?;
            ctx.emit_term("q", &enc.q)?;
            ctx.emit("formula", &enc.to_formula())?;
            Ok(0)
        }
        Command::QePipeline { datum, compare } => {
            let inp = load(datum)?;
            let d = parse_datum(&inp.text, &ctx.reg, inp.dir.as_deref()).map_err(|e| CliError::input(&inp.origin, e))?;
            let pc = PipelineConfig {
                oracle: ctx.cfg,
                ..PipelineConfig::default()
            };
            let res = engine(qe_pipeline(&d.omega, &d.datum, &pc))?;
            ctx.emit("formula", &res.formula)?;
            ctx.emit("covered", &res.covered)?;
            for n in &res.notes {
                ctx.line(format!("note {n}"));
            }
            finish_compare(ctx, &res.formula, compare.as_deref())
        }
        Command::DElim { psi, case, hole, p, q, h } => {
            let psi = ctx.formula(psi)?;
            let (p, q, h) = (ctx.term(p)?, ctx.term(q)?, ctx.term(h)?);
            let out = match case {
                DivCase::Phq => engine(d_eliminate_phq(&psi, hole, &p, &q, &h))?,
                DivCase::Qhp => {
                    let covered = engine(d_eliminate_qhp(&psi, hole, &p, &q, &h))?;
                    for piece in &covered.pieces {
                        ctx.emit("guard", &piece.guard)?;
                        ctx.emit("body", &piece.body)?;
                    }
                    covered.to_formula()
                }
            };
            ctx.emit("formula", &out)?;
            let original = substitute_one(&psi, hole, Term::d(p, q));
            ctx.compare(&out, &original)
        }
        Command::FlatImage { map, compare } => {
            let mf = load_map(map)?;
            let sigma = mf.special.unwrap_or_else(SpecialSet::whole);
            let img = engine(flat_image(&mf.map, &sigma, ChevalleyBudget::default()))?;
            ctx.line(format!("source-residue {}", one_line(&img.source_residue.to_string())));
            ctx.line(format!("image-residue {}", one_line(&img.residue.to_string())));
            ctx.emit("formula", &img.formula)?;
            finish_compare(ctx, &img.formula, compare.as_deref())
        }
        Command::Reduce { poly, vars } => {
            let t = ctx.term(poly)?;
            let p = kpoly(&t)?;
            let vars = if vars.is_empty() { p.vars().into_iter().collect() } else { vars.clone() };
            let r = engine(reduce(&p, &vars))?;
            ctx.emit_term("residue", &r.to_term(&vars))?;
            Ok(0)
        }
        Command::Chevalley { map } => {
            let mf = load_map(map)?;
            let sigma = mf.special.unwrap_or_else(SpecialSet::whole);
            let budget = ChevalleyBudget::default();
            let s = engine(special_to_residue(&sigma, &mf.map.source))?;
            let m = engine(residue_morphism(&mf.map))?;
            let img = engine(engine(chevalley_image(&s, &m, budget))?.normalize(budget.gb))?;
            ctx.out.push_str(&img.to_string());
            Ok(0)
        }
        Command::Gb {
            polys,
            vars,
            order,
            eliminate,
            saturate: sat,
        } => gb(ctx, polys, vars, *order, *eliminate, sat.as_deref()),
        Command::Osgood { facts, count, n, degree } => osgood_cmd(ctx, *facts, *count, *n, *degree),
    }
}

fn one_line(s: &str) -> String {
    s.trim_end().replace('\n', "; ")
}

fn finish_compare(ctx: &mut Ctx, ours: &Formula, compare: Option<&str>) -> Result<u8, CliError> {
    match compare {
        Some(c) => {
            let other = ctx.formula(c)?;
            ctx.compare(ours, &other)
        }
        None => Ok(0),
    }
}

fn load_blowup(ctx: &Ctx, arg: &str) -> Result<BlowupSpec, CliError> {
    let inp = load(arg)?;
    let (spec, _) = parse_blowup(&inp.text, &ctx.reg).map_err(|e| CliError::input(&inp.origin, e))?;
    Ok(spec)
}

fn load_map(arg: &str) -> Result<MapFile, CliError> {
    let inp = load(arg)?;
    parse_admissible_map(&inp.text).map_err(|e| CliError::input(&inp.origin, e))
}

fn kpoly(t: &Term) -> Result<KPoly, CliError> {
    KPoly::from_term(t).ok_or_else(|| CliError::Usage(format!("{t} is not a polynomial")))
}

fn eval(ctx: &mut Ctx, formula: &str, point: &str, vars: &[String], hint: &[String], budget: usize) -> Result<u8, CliError> {
    let f = ctx.formula(formula)?;
    let p = parse_point(point).map_err(|e| CliError::input("--point", e))?;
    let vars: Vec<String> = if vars.is_empty() { f.free_vars().into_iter().collect() } else { vars.to_vec() };
    if vars.len() != p.len() {
        return Err(CliError::Usage(format!("{} variables but {} coordinates", vars.len(), p.len())));
    }
    let env = env_from(&vars, &p);
    if let Formula::Exists(bound, body) = &f {
        let hints = if hint.is_empty() {
            Vec::new()
        } else if hint.len() != bound.len() {
            return Err(CliError::Usage(format!("{} hints for {} bound variables", hint.len(), bound.len())));
        } else {
            vec![hint.iter().map(|h| ctx.term(h)).collect::<Result<Vec<_>, _>>()?]
        };
        let outcome = engine(exists_check(bound, body, &env, &hints, budget, &ctx.cfg))?;
        return Ok(match outcome {
            ExistsOutcome::Witnessed(w) => {
                ctx.line("verdict true");
                ctx.line(format!("witness {}", format_point(&w)));
                0
            }
            ExistsOutcome::NoWitnessFound => {
                ctx.line(format!("verdict no-witness-found ({budget} random candidates)"));
                0
            }
            ExistsOutcome::NeedsPrecision => {
                ctx.line("verdict needs-precision");
                2
            }
        });
    }
    let mut n = ctx.cfg.start_precision;
    loop {
        let v = engine(eval_formula(&f, &env, n))?;
        if v != Verdict::NeedsPrecision || n >= ctx.cfg.max_precision {
            ctx.line(format!("verdict {v}"));
            ctx.line(format!("precision {n}"));
            return Ok(if v == Verdict::NeedsPrecision { 2 } else { 0 });
        }
        n = (2 * n).min(ctx.cfg.max_precision);
    }
}

fn rational_poly(ctx: &Ctx, arg: &str, vars: &[String]) -> Result<MPoly, CliError> {
    let t = ctx.term(arg)?;
    let p = kpoly(&t)?;
    if p.terms().any(|(_, c)| c.terms().any(|(k, _)| k != 0)) {
        return Err(CliError::Usage(format!("{t}: coefficients must be rational")));
    }
    engine(reduce(&p, vars))
}

fn gb(
    ctx: &mut Ctx,
    polys: &[String],
    vars: &[String],
    order: Order,
    eliminate: Option<usize>,
    sat: Option<&str>,
) -> Result<u8, CliError> {
    let budget = GbBudget::default();
    let gens = polys
        .iter()
        .map(|a| rational_poly(ctx, a, vars))
        .collect::<Result<Vec<_>, _>>()?;
    let (basis, names) = match (eliminate, sat) {
        (Some(_), Some(_)) => return Err(CliError::Usage("--eliminate and --saturate are exclusive".into())),
        (Some(k), None) if k > vars.len() => return Err(CliError::Usage(format!("cannot eliminate {k} variables"))),
        (Some(k), None) => (engine(elimination_ideal(&gens, k, budget))?, vars[k..].to_vec()),
        (None, Some(g)) => {
            let g = rational_poly(ctx, g, vars)?;
            (engine(saturate(&gens, &g, budget))?, vars.to_vec())
        }
        (None, None) => {
            let order = match order {
                Order::Grevlex => MonomialOrder::GrevLex,
                Order::Lex => MonomialOrder::Lex,
            };
            let gens: Vec<MPoly> = gens.iter().map(|g| g.with_order(order)).collect();
            (engine(buchberger(&gens, order, budget))?, vars.to_vec())
        }
    };
    ctx.line(format!("vars {}", names.join(" ")));
    for g in &basis {
        ctx.emit_term("basis", &g.to_term(&names))?;
    }
    Ok(0)
}

fn osgood_cmd(ctx: &mut Ctx, facts: Facts, count: usize, n: i64, degree: u32) -> Result<u8, CliError> {
    ctx.line(format!("surface (s, s t, s exptau(t)), {count} points at precision {n}"));
    match facts {
        Facts::Membership => {
            ctx.emit("description", &osgood::membership_formula())?;
            let r = engine(osgood::check_membership(count, ctx.cfg.seed, n))?;
            ctx.line(format!("members {}", r.members));
            ctx.line(format!("members-true {}", r.members_true));
            ctx.line(format!("members-not-refuted {}", r.members_not_refuted));
            if let Some(k) = r.min_residual_order {
                ctx.line(format!("min-residual-order {k}"));
            }
            ctx.line(format!("non-members {}", r.non_members));
            ctx.line(format!("non-members-rejected {}", r.non_members_rejected));
            for f in &r.failures {
                ctx.line(format!("failure {f}"));
            }
            ctx.line(format!("verdict {}", if r.passed() { "pass" } else { "fail" }));
            Ok(if r.passed() { 0 } else { 1 })
        }
        Facts::Zariski => {
            let ok = engine(osgood::zariski_evidence(count, degree, ctx.cfg.seed, n))?;
            ctx.line(format!("degree {degree}"));
            ctx.line(format!("independent {ok}"));
            Ok(if ok { 0 } else { 1 })
        }
    }
}
