use hall_core::algebra::{basis_coproduct, basis_product, serre_defect};
use hall_core::functor::{shift_fuzz, theorem_instances, v_unit_sweep, sweep_theorem, TheoremInput, VUnit, VUnitReport};
use hall_core::green::{bialgebra_defect, sweep_green, twist_sign_sweep, TwistSignReport};
use hall_core::{ClassKey, DimVector, Execution, HallContext, HallError, Quiver, Result, Sign};
use log::info;
use serde_json::{json, Value};

use crate::report::Report;
use crate::{Cli, Command, Global, TheoremArgs};

/// Total dimension at which the twist sign and the unit are resolved for
/// reports that do not sweep them directly.
const CONVENTION_BOUND: u32 = 2;

/// Quivers swept by `shifts` when none is given.
const SHIFT_QUIVERS: [&str; 4] = ["a2", "kronecker", "jordan", "d4"];

pub fn run(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    let exec = if g.sequential { Execution::Sequential } else { Execution::Parallel };
    match &cli.command {
        Command::Enumerate { dim } => enumerate(&context(g)?, dim),
        Command::Hall { x, y } => hall(&context(g)?, &x.0, y.as_ref().map(|y| &y.0), exec),
        Command::Green { max_dim } => green(&context(g)?, *max_dim, exec),
        Command::Serre => serre(&context(g)?, exec),
        Command::Theorem(args) => theorem(&context(g)?, args, exec),
        Command::Shifts {
            samples,
            seed,
            max_entry,
            n_term,
        } => shifts(g, *samples as usize, *seed, *max_entry, (*n_term).into(), exec),
        Command::Bialgebra { max_dim, x, y } => {
            let pair = x.as_ref().zip(y.as_ref()).map(|(x, y)| (&x.0, &y.0));
            bialgebra(&context(g)?, *max_dim, pair, exec)
        }
    }
}

fn quiver(g: &Global) -> Result<Option<Quiver>> {
    match (&g.quiver, &g.quiver_file) {
        (Some(name), _) => Quiver::preset(name).map(Some),
        (None, Some(path)) => Quiver::from_json_str(&std::fs::read_to_string(path)?).map(Some),
        (None, None) => Ok(None),
    }
}

fn context(g: &Global) -> Result<HallContext> {
    let quiver = quiver(g)?.ok_or_else(|| HallError::InvalidArgument("one of --quiver or --quiver-file is required".into()))?;
    let mut ctx = HallContext::new(quiver, g.q)?.with_cache_dir(g.cache_dir.clone());
    if let Some(b) = g.budget {
        ctx = ctx.with_budget(b);
    }
    Ok(ctx)
}

fn quiver_name(ctx: &HallContext) -> Value {
    ctx.quiver().to_json_value()
}

fn base(command: &str, ctx: &HallContext) -> Report {
    Report::new(command).field("quiver", quiver_name(ctx)).field("q", ctx.q())
}

fn key_json(k: &ClassKey) -> Value {
    json!(k.to_string())
}

struct Conventions {
    twist: TwistSignReport,
    units: VUnitReport,
}

impl Conventions {
    /// Sweeps `ctx` together with A₂ over the same field; some quivers (the
    /// Jordan quiver) cannot tell the candidates apart at small dimension.
    fn resolve(ctx: &HallContext, exec: Execution) -> Result<Self> {
        let reference = HallContext::new(Quiver::preset("a2")?, ctx.q())?;
        let contexts = [ctx, &reference];
        let twist = twist_sign_sweep(&contexts, CONVENTION_BOUND, exec)?;
        let jobs = contexts
            .iter()
            .map(|c| Ok((*c, theorem_instances(c, CONVENTION_BOUND)?)))
            .collect::<Result<Vec<_>>>()?;
        let units = v_unit_sweep(&jobs, exec)?;
        info!("conventions: twist survivors {:?}, unit survivors {:?}", twist.survivors, units.survivors);
        Ok(Conventions { twist, units })
    }

    fn sign(&self) -> Result<Sign> {
        self.twist.sign()
    }

    /// The unique surviving unit, or the first one when several survive.
    fn unit(&self) -> Result<VUnit> {
        self.units
            .survivors
            .first()
            .copied()
            .ok_or_else(|| HallError::NoConsistentConvention("no candidate unit survives".into()))
    }

    fn attach(&self, report: Report) -> Report {
        let text = |r: Result<String>| r.unwrap_or_else(|_| "none".into());
        report
            .field("twist_sign", text(self.sign().map(|s| s.to_string())))
            .field("v_unit", text(self.unit().map(|u| u.to_string())))
            .field(
                "v_unit_survivors",
                Value::from(self.units.survivors.iter().map(|u| u.to_string()).collect::<Vec<_>>()),
            )
            .field("convention_bound", CONVENTION_BOUND)
    }
}

fn enumerate(ctx: &HallContext, dim: &str) -> Result<Report> {
    let dim = ctx.quiver().parse_dim(dim)?;
    let table = ctx.table(&dim)?;
    let valid = table.validate().is_ok();
    let body: Value = serde_json::from_str(&table.to_json())?;
    let mut r = Report::new("enumerate")
        .field("quiver", quiver_name(ctx))
        .field("q", ctx.q())
        .field("dim", Value::from(dim.as_slice().to_vec()))
        .field("class_count", table.len())
        .columns(&["class", "orbit_size", "aut_order", "representative"])
        .body(body)
        .passed(valid);
    for c in table.classes() {
        let rep: Vec<String> = c
            .rep
            .matrices()
            .iter()
            .map(|m| m.data().iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        r.row(vec![
            ClassKey::new(dim.clone(), c.id).to_string(),
            c.orbit_size.to_string(),
            c.aut_order.to_string(),
            format!("[{}]", rep.join(" | ")),
        ]);
    }
    Ok(r)
}

fn hall(ctx: &HallContext, x: &ClassKey, y: Option<&ClassKey>, exec: Execution) -> Result<Report> {
    ctx.check_key(x)?;
    let conv = Conventions::resolve(ctx, exec)?;
    match y {
        Some(y) => {
            ctx.check_key(y)?;
            let prod = basis_product(ctx, x, y)?;
            let mut r = conv
                .attach(base("hall", ctx))
                .field("operation", "product")
                .field("x", key_json(x))
                .field("y", key_json(y))
                .columns(&["class", "coefficient"])
                .body(json!({ "terms": prod.to_json_value() }));
            for (k, c) in prod.terms() {
                r.row(vec![k.to_string(), c.to_string()]);
            }
            Ok(r)
        }
        None => {
            let co = basis_coproduct(ctx, x)?;
            let terms: Vec<Value> = co
                .terms()
                .iter()
                .map(|((l, rt), c)| json!({ "left": key_json(l), "right": key_json(rt), "coefficient": c.to_string() }))
                .collect();
            let mut r = conv
                .attach(base("hall", ctx))
                .field("operation", "coproduct")
                .field("x", key_json(x))
                .columns(&["left", "right", "coefficient"])
                .body(json!({ "terms": terms }));
            for ((l, rt), c) in co.terms() {
                r.row(vec![l.to_string(), rt.to_string(), c.to_string()]);
            }
            Ok(r)
        }
    }
}

fn green(ctx: &HallContext, max_dim: u32, exec: Execution) -> Result<Report> {
    let conv = Conventions::resolve(ctx, exec)?;
    let sweep = sweep_green(ctx, max_dim, exec)?;
    let failures = sweep.failures().count();
    info!("green: {} instances, {failures} mismatches", sweep.instances.len());
    let body: Value = serde_json::from_str(&sweep.to_json())?;
    let mut r = conv
        .attach(base("green", ctx))
        .field("max_dim", max_dim)
        .field("instances", sweep.instances.len())
        .field("mismatches", failures)
        .field("degenerate_ok", sweep.degenerate_ok)
        .columns(&["alpha", "beta", "alphap", "betap", "lhs", "rhs", "equal"])
        .body(body)
        .passed(sweep.all_equal && sweep.degenerate_ok);
    for line in sweep.to_tsv().lines().skip(1) {
        r.row(line.split('\t').map(str::to_string).collect());
    }
    Ok(r)
}

fn serre(ctx: &HallContext, exec: Execution) -> Result<Report> {
    let conv = Conventions::resolve(ctx, exec)?;
    let n = ctx.quiver().vertex_count();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || ctx.quiver().has_loop_at(i) || ctx.quiver().has_loop_at(j) {
                continue;
            }
            let d = serre_defect(ctx, i, j)?;
            rows.push((ctx.quiver().vertices()[i].clone(), ctx.quiver().vertices()[j].clone(), d));
        }
    }
    let passed = rows.iter().all(|(_, _, d)| d.is_zero());
    let body = json!({
        "relations": rows
            .iter()
            .map(|(i, j, d)| json!({ "i": i, "j": j, "zero": d.is_zero(), "defect": d.to_json_value() }))
            .collect::<Vec<_>>()
    });
    let mut r = conv
        .attach(base("serre", ctx))
        .field("relations", rows.len())
        .columns(&["i", "j", "defect_terms", "zero"])
        .body(body)
        .passed(passed);
    for (i, j, d) in &rows {
        r.row(vec![i.clone(), j.clone(), d.terms().len().to_string(), d.is_zero().to_string()]);
    }
    Ok(r)
}

fn theorem(ctx: &HallContext, args: &TheoremArgs, exec: Execution) -> Result<Report> {
    let conv = Conventions::resolve(ctx, exec)?;
    let unit = match args.v_unit {
        Some(u) => u,
        None => conv.unit()?,
    };
    let inputs = match (&args.alpha, &args.beta, &args.alphap, &args.betap) {
        (Some(a), Some(b), Some(ap), Some(bp)) => {
            let parse = |s: &String| ctx.quiver().parse_dim(s);
            let (a, b, ap, bp) = (parse(a)?, parse(b)?, parse(ap)?, parse(bp)?);
            if a.checked_add(&b)? != ap.checked_add(&bp)? {
                return Err(HallError::DimensionMismatch(format!("{a} + {b} differs from {ap} + {bp}")));
            }
            pairs_of_dims(ctx, &a, &b, &ap, &bp)?
        }
        _ => theorem_instances(ctx, args.max_dim)?,
    };
    let sweep = sweep_theorem(ctx, &inputs, unit, exec)?;
    let body: Value = serde_json::from_str(&sweep.to_json())?;
    let mut r = conv
        .attach(base("theorem", ctx))
        .field("v_unit_used", unit.to_string())
        .field("instances", sweep.rows.len())
        .field("mismatches", sweep.rows.iter().filter(|r| !r.equal).count())
        .columns(&["A", "B", "alphap", "betap", "v_unit", "support", "equal"])
        .body(body)
        .passed(sweep.all_equal);
    for line in sweep.to_tsv().lines().skip(1) {
        r.row(line.split('\t').map(str::to_string).collect());
    }
    Ok(r)
}

fn pairs_of_dims(ctx: &HallContext, a: &DimVector, b: &DimVector, ap: &DimVector, bp: &DimVector) -> Result<Vec<TheoremInput>> {
    let mut out = Vec::new();
    for ka in ctx.classes(a)? {
        for kb in ctx.classes(b)? {
            out.push(TheoremInput {
                a: ka.clone(),
                b: kb,
                alphap: ap.clone(),
                betap: bp.clone(),
            });
        }
    }
    Ok(out)
}

fn shifts(g: &Global, samples: usize, seed: u64, max_entry: u32, n_term: hall_core::functor::NTerm, exec: Execution) -> Result<Report> {
    let quivers: Vec<(String, Quiver)> = match quiver(g)? {
        Some(q) => vec![(g.quiver.clone().unwrap_or_else(|| "file".into()), q)],
        None => SHIFT_QUIVERS
            .iter()
            .map(|n| Ok((n.to_string(), Quiver::preset(n)?)))
            .collect::<Result<_>>()?,
    };
    let mut reports = Vec::new();
    for (name, q) in &quivers {
        reports.push((name, shift_fuzz(q, samples, seed, max_entry, n_term, exec)?));
    }
    let passed = reports.iter().all(|(_, r)| r.passed());
    let body = json!({
        "quivers": reports
            .iter()
            .map(|(name, r)| json!({
                "name": name,
                "quiver": r.quiver.to_json_value(),
                "lambdas": r.lambdas,
                "failing_samples": r.failures.len(),
                "failures": r.failures.iter().map(|f| f.iter().map(|d| d.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }))
            .collect::<Vec<_>>()
    });
    let mut r = Report::new("shifts")
        .field("samples", samples)
        .field("seed", seed)
        .field("max_entry", max_entry)
        .field("n_term", format!("{n_term:?}").to_lowercase())
        .columns(&["quiver", "lambdas", "failing_samples"])
        .body(body)
        .passed(passed);
    for (name, rep) in &reports {
        r.row(vec![name.to_string(), rep.lambdas.to_string(), rep.failures.len().to_string()]);
    }
    Ok(r)
}

fn bialgebra(ctx: &HallContext, max_dim: u32, pair: Option<(&ClassKey, &ClassKey)>, exec: Execution) -> Result<Report> {
    match pair {
        Some((x, y)) => {
            ctx.check_key(x)?;
            ctx.check_key(y)?;
            let conv = Conventions::resolve(ctx, exec)?;
            let mut r = conv
                .attach(base("bialgebra", ctx))
                .field("x", key_json(x))
                .field("y", key_json(y))
                .columns(&["sign", "defect_terms", "zero"]);
            let mut zero = Vec::new();
            for s in Sign::BOTH {
                let d = bialgebra_defect(ctx, x, y, s)?;
                r.row(vec![s.to_string(), d.terms().len().to_string(), d.is_zero().to_string()]);
                zero.push(json!({ "sign": s.to_string(), "zero": d.is_zero() }));
            }
            let passed = conv.sign().map(|s| bialgebra_defect(ctx, x, y, s).map(|d| d.is_zero())).unwrap_or(Ok(false))?;
            Ok(r.body(json!({ "defects": zero })).passed(passed))
        }
        None => {
            let conv = Conventions::resolve(ctx, exec)?;
            let sweep = twist_sign_sweep(&[ctx], max_dim, exec)?;
            let passed = conv.sign().is_ok_and(|s| sweep.survivors.contains(&s));
            let mut r = conv
                .attach(base("bialgebra", ctx))
                .field("max_dim", max_dim)
                .field("pairs", sweep.pairs)
                .columns(&["sign", "nonzero_defects"]);
            for (s, n) in &sweep.failures {
                r.row(vec![s.to_string(), n.to_string()]);
            }
            let body = json!({
                "failures": sweep.failures.iter().map(|(s, n)| (s.to_string(), json!(n))).collect::<serde_json::Map<_, _>>(),
                "survivors": sweep.survivors.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            });
            Ok(r.body(body).passed(passed))
        }
    }
}
