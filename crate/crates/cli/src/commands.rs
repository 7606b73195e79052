use std::io::{BufRead, BufReader};
use std::sync::Mutex;
use std::time::Duration;

use modcat_core::bounds::BoundTable;
use modcat_core::efsearch::{count_solutions, enumerate_integral_streaming, SearchConfig};
use modcat_core::filters::{
    default_rules, parse_rules, run_filter_pipeline, Family, TheoremRule, VerdictStatus,
};
use modcat_core::mnsd::{enumerate_mnsd, mnsd_profile, MnsdConfig};
use modcat_core::numeric::{tuple_to_profile, BigInt, DimensionProfile, ReciprocalTuple};
use modcat_core::SearchReport;
use serde_json::{json, Map, Value};

use crate::args::{BoundsArgs, Cli, CountArgs, FilterArgs, MnsdArgs, SearchArgs};
use crate::error::{CliError, CliResult};
use crate::output::{num, parse_num, sha256_file, tuple_record, Manifest, Output};

pub struct Ctx<'a> {
    pub cli: &'a Cli,
}

impl Ctx<'_> {
    pub fn manifest(
        &self,
        subcommand: &'static str,
        config: Value,
        inputs: Vec<(String, String)>,
    ) -> Manifest {
        Manifest {
            subcommand,
            config,
            threads: rayon::current_num_threads(),
            inputs,
            deterministic: self.cli.deterministic,
        }
    }

    pub fn open(&self) -> CliResult<Output> {
        Output::open(self.cli.out.as_deref())
    }

    fn wall_ms(&self, d: Duration) -> u128 {
        if self.cli.deterministic {
            0
        } else {
            d.as_millis()
        }
    }
}

fn parse_cap(cap: &Option<String>) -> CliResult<Option<BigInt>> {
    cap.as_ref()
        .map(|s| {
            s.trim()
                .parse::<BigInt>()
                .ok()
                .filter(|v| *v > BigInt::from(0))
                .ok_or_else(|| {
                    CliError::Usage(format!("--dim-cap must be a positive integer, got '{s}'"))
                })
        })
        .transpose()
}

fn profile_of(t: &ReciprocalTuple) -> CliResult<DimensionProfile> {
    Ok(if t.weight() == 1 {
        tuple_to_profile(t)?
    } else {
        mnsd_profile(t)?
    })
}

/// Rule table plus the `(path, digest)` of the file it came from, if any.
type LoadedRules = (Vec<TheoremRule>, Vec<(String, String)>);

pub fn load_rules(path: Option<&std::path::Path>) -> CliResult<LoadedRules> {
    match path {
        None => Ok((default_rules(), Vec::new())),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(CliError::io(p))?;
            let rules =
                parse_rules(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            Ok((rules, vec![(p.display().to_string(), sha256_file(p)?)]))
        }
    }
}

pub fn bounds(ctx: &Ctx, args: &BoundsArgs) -> CliResult<()> {
    let table = BoundTable::new(args.rank, args.ell)?;
    let seq_name = if args.ell == 1 { "u" } else { "a" };
    let rows: Vec<(usize, &BigInt, &BigInt, &BigInt)> = table
        .positions()
        .iter()
        .enumerate()
        .map(|(i, (lo, hi))| {
            let s = if args.ell == 1 {
                &table.u[i]
            } else {
                &table.a[i]
            };
            (i + 1, s, lo, hi)
        })
        .collect();
    let mut out = ctx.open()?;
    if args.json {
        out.record(
            &ctx.manifest(
                "bounds",
                json!({ "rank": args.rank, "ell": args.ell }),
                vec![],
            )
            .to_value(),
        )?;
        for (i, s, lo, hi) in &rows {
            out.record(&json!({ "i": i, seq_name: num(s), "lower": num(lo), "upper": num(hi) }))?;
        }
        return out.summary(json!({ "positions": rows.len() }), ctx.cli.deterministic);
    }
    if args.csv {
        out.line(&format!("i,{seq_name},lower,upper"))?;
        for (i, s, lo, hi) in &rows {
            out.line(&format!("{i},{s},{lo},{hi}"))?;
        }
        return out.flush();
    }
    let cells: Vec<[String; 4]> = std::iter::once([
        "i".into(),
        format!("{seq_name}_i"),
        "lower".into(),
        "upper".into(),
    ])
    .chain(
        rows.iter()
            .map(|(i, s, lo, hi)| [i.to_string(), s.to_string(), lo.to_string(), hi.to_string()]),
    )
    .collect();
    let widths: Vec<usize> = (0..4)
        .map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    for r in &cells {
        let line: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(v, w)| format!("{v:>w$}"))
            .collect();
        out.line(&line.join("  "))?;
    }
    out.flush()
}

fn report_summary(ctx: &Ctx, report: &SearchReport) -> Value {
    let pruned: Map<String, Value> = report
        .pruned_by
        .iter()
        .map(|(k, v)| (k.as_str().to_string(), json!(v)))
        .collect();
    json!({
        "solutions": report.solutions.len(),
        "nodes_visited": report.nodes_visited,
        "pruned_by": pruned,
        "wall_time_ms": ctx.wall_ms(report.wall_time),
    })
}

pub fn search(ctx: &Ctx, args: &SearchArgs) -> CliResult<()> {
    let cap = parse_cap(&args.dim_cap)?;
    if args.rank == 0 {
        return Err(CliError::Usage("--rank must be at least 1".into()));
    }
    let mut cfg = SearchConfig::new(args.rank);
    cfg.dim_cap = cap.clone();
    cfg.emit_partial = args.stream;
    let config = json!({
        "rank": args.rank,
        "ell": 1,
        "dim_cap": cap.as_ref().map(num),
        "stream": args.stream,
    });
    let mut out = ctx.open()?;
    out.record(&ctx.manifest("search", config, vec![]).to_value())?;

    let shared = Mutex::new((out, None::<CliError>));
    let sink = |t: &ReciprocalTuple| {
        let mut g = shared.lock().unwrap();
        if g.1.is_some() {
            return;
        }
        let res = profile_of(t).and_then(|p| g.0.record(&tuple_record(t, &p)));
        if let Err(e) = res {
            g.1 = Some(e);
        }
    };
    let report = enumerate_integral_streaming(&cfg, sink)?;
    let (mut out, err) = shared.into_inner().unwrap();
    if let Some(e) = err {
        return Err(e);
    }
    if !args.stream {
        for t in &report.solutions {
            out.record(&tuple_record(t, &profile_of(t)?))?;
        }
    }
    out.summary(report_summary(ctx, &report), ctx.cli.deterministic)
}

pub fn mnsd(ctx: &Ctx, args: &MnsdArgs) -> CliResult<()> {
    let cap = parse_cap(&args.dim_cap)?;
    let mut cfg = MnsdConfig::new(args.rank);
    cfg.dim_cap = cap.clone();
    let config = json!({ "rank": args.rank, "ell": 2, "dim_cap": cap.as_ref().map(num) });
    let report = enumerate_mnsd(&cfg)?;
    let mut out = ctx.open()?;
    out.record(&ctx.manifest("mnsd", config, vec![]).to_value())?;
    for t in &report.solutions {
        out.record(&tuple_record(t, &profile_of(t)?))?;
    }
    out.summary(report_summary(ctx, &report), ctx.cli.deterministic)
}

fn tuple_from_record(v: &Value) -> Option<ReciprocalTuple> {
    let ell = v.get("ell")?.as_u64()? as u32;
    let x = v
        .get("x")?
        .as_array()?
        .iter()
        .map(parse_num)
        .collect::<Option<Vec<_>>>()?;
    ReciprocalTuple::new(x, ell).ok()
}

pub fn filter(ctx: &Ctx, args: &FilterArgs) -> CliResult<()> {
    let (rules, mut inputs) = load_rules(args.rules.as_deref())?;
    inputs.insert(
        0,
        (args.input.display().to_string(), sha256_file(&args.input)?),
    );
    let file = std::fs::File::open(&args.input).map_err(CliError::io(&args.input))?;
    let config = json!({ "rules": if args.rules.is_some() { "file" } else { "default" } });
    let mut out = ctx.open()?;
    out.record(&ctx.manifest("filter", config, inputs).to_value())?;
    let mut counts = [0u64; 3];
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(CliError::io(&args.input))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = || {
            CliError::Usage(format!(
                "{}:{}: not a search record",
                args.input.display(),
                lineno + 1
            ))
        };
        let Value::Object(mut rec) = serde_json::from_str::<Value>(&line).map_err(|_| bad())?
        else {
            return Err(bad());
        };
        if rec.contains_key("record") {
            continue;
        }
        let t = tuple_from_record(&Value::Object(rec.clone())).ok_or_else(bad)?;
        let p = profile_of(&t)?;
        let verdict = run_filter_pipeline(&p, Family::from_weight(t.weight()), &rules)?;
        counts[match verdict.status {
            VerdictStatus::Pointed => 0,
            VerdictStatus::Eliminated => 1,
            VerdictStatus::Survives => 2,
        }] += 1;
        rec.insert(
            "verdict".into(),
            serde_json::to_value(&verdict).expect("verdicts serialize"),
        );
        out.record(&Value::Object(rec))?;
    }
    out.summary(
        json!({ "pointed": counts[0], "eliminated": counts[1], "survives": counts[2] }),
        ctx.cli.deterministic,
    )
}

pub fn count(ctx: &Ctx, args: &CountArgs) -> CliResult<()> {
    let n = count_solutions(args.rank)?;
    let mut out = ctx.open()?;
    if args.json {
        out.record(
            &ctx.manifest("count", json!({ "rank": args.rank }), vec![])
                .to_value(),
        )?;
        out.record(&json!({ "rank": args.rank, "count": n }))?;
        return out.summary(json!({}), ctx.cli.deterministic);
    }
    out.line(&n.to_string())?;
    out.flush()
}
