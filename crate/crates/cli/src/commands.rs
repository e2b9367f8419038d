use std::io::Write;
use std::path::Path;

use kohn_core::groebner::{effective_type, local_colength, DEFAULT_TYPE_CAP};
use kohn_core::kohn::{audit_trace, compare_classic, run_algorithm, Status};
use kohn_core::oracle::{colength_staircase, member_linalg, type_bruteforce, validity_cap};
use kohn_core::poly::{jacobian_det, parse_poly};
use kohn_core::{Ideal, Monomial, Polynomial, Ring, Trace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::CliError;
use crate::problem::{Problem, ProblemConfig};
use crate::render::{derivation_text, summary_json, summary_line};
use crate::{BoundArgs, Cli, Command, Format, GlobalOpts, OracleCommand};

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let o = &cli.opts;
    match &cli.command {
        Command::Type { problem } => cmd_type(&Problem::load(problem)?, o),
        Command::Run { problem } => cmd_run(&Problem::load(problem)?, o),
        Command::CheckJacobianBound(args) => cmd_check_jacobian_bound(args, o),
        Command::CompareClassic { problem, power_cap } => {
            cmd_compare_classic(&Problem::load(problem)?, *power_cap, o)
        }
        Command::Audit { trace_file } => cmd_audit(trace_file, o),
        Command::Oracle(sub) => cmd_oracle(sub, o),
    }
}

fn overrides(o: &GlobalOpts) -> ProblemConfig {
    ProblemConfig {
        seed: o.seed,
        max_retries: o.max_retries,
        type_cap: o.type_cap,
        degree_cap: o.degree_cap,
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{v}");
}

fn cmd_type(p: &Problem, o: &GlobalOpts) -> Result<(), CliError> {
    let config = p.run_config(&overrides(o));
    let ideal = Ideal::new(p.generators.clone())?;
    let report = effective_type(&ideal, config.type_cap)?;
    match o.format {
        Format::Text => println!("{report}"),
        Format::Json => print_json(&json!({
            "p_star": report.p_star,
            "lower_bound": report.lower_bound.to_string(),
            "upper_bound": report.upper_bound,
        })),
    }
    Ok(())
}

/// Writes `contents` next to `path` and renames it into place.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

fn cmd_run(p: &Problem, o: &GlobalOpts) -> Result<(), CliError> {
    let config = p.run_config(&overrides(o));
    let trace = run_algorithm(&p.generators, &config)?;
    if let Some(path) = &o.trace {
        write_atomic(path, &trace.to_jsonl())?;
    }
    match o.format {
        Format::Text => print!("{}", derivation_text(&trace)),
        Format::Json => print_json(&summary_json(&trace)),
    }
    match &trace.status {
        Status::Terminated => Ok(()),
        Status::Failed(reason) => Err(CliError::Budget(reason.clone())),
    }
}

fn random_monomial_map(ring: &std::sync::Arc<Ring>, rng: &mut ChaCha8Rng, max_exp: u32) -> Vec<Polynomial> {
    let n = ring.nvars();
    (0..n)
        .map(|i| {
            let mut m = Monomial::one(n);
            m.set_exp(i, rng.gen_range(1..=max_exp));
            Polynomial::monomial(ring, m, 1.into())
        })
        .collect()
}

fn cmd_check_jacobian_bound(args: &BoundArgs, o: &GlobalOpts) -> Result<(), CliError> {
    let ring = Ring::new(&args.variables).map_err(|e| CliError::Usage(e.to_string()))?;
    let n = ring.nvars();
    let maps: Vec<Vec<Polynomial>> = if args.map.is_empty() {
        if args.max_exponent == 0 {
            return Err(CliError::Usage("--max-exponent must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(o.seed.unwrap_or(0));
        (0..args.trials)
            .map(|_| random_monomial_map(&ring, &mut rng, args.max_exponent))
            .collect()
    } else {
        if args.map.len() != n {
            return Err(CliError::Usage(format!(
                "a map needs {n} components, got {}",
                args.map.len()
            )));
        }
        let map = args
            .map
            .iter()
            .map(|s| parse_poly(s, &ring).map_err(|e| CliError::Parse(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        vec![map]
    };
    let cap = o.type_cap.unwrap_or(DEFAULT_TYPE_CAP);
    let vars: Vec<usize> = (0..n).collect();
    let (mut checked, mut failed, mut skipped) = (0, 0, 0);
    let mut rows = Vec::new();
    for map in &maps {
        let shown: Vec<String> = map.iter().map(|f| f.to_string()).collect();
        let lambda = Ideal::new(map.clone())
            .map_err(CliError::from)
            .and_then(|i| local_colength(&i, cap).map_err(CliError::from));
        let lambda = match lambda {
            Ok(l) => l,
            Err(e) => {
                skipped += 1;
                match o.format {
                    Format::Text => println!("({}): skipped, colength not finite: {e}", shown.join(", ")),
                    Format::Json => rows.push(json!({"map": shown, "skipped": e.to_string()})),
                }
                continue;
            }
        };
        let jac = jacobian_det(map, &vars).map_err(|e| CliError::Parse(e.to_string()))?;
        let ord = jac.vanishing_order().finite();
        let pass = ord.is_some_and(|d| (d as usize) < lambda);
        checked += 1;
        if !pass {
            failed += 1;
        }
        let ord_text = ord.map(|d| d.to_string()).unwrap_or_else(|| "inf".into());
        match o.format {
            Format::Text => println!(
                "({}): λ = {lambda}, ord Jac = {ord_text}, {}",
                shown.join(", "),
                if pass { "pass" } else { "FAIL" }
            ),
            Format::Json => rows.push(json!({
                "map": shown, "lambda": lambda, "ord": ord, "pass": pass,
            })),
        }
    }
    match o.format {
        Format::Text => println!("{checked} checked, {failed} failed, {skipped} skipped"),
        Format::Json => print_json(&json!({
            "trials": rows, "checked": checked, "failed": failed, "skipped": skipped,
        })),
    }
    if failed > 0 {
        Err(CliError::Failed(format!("{failed} maps violate the bound")))
    } else {
        Ok(())
    }
}

fn cmd_compare_classic(p: &Problem, power_cap: u32, o: &GlobalOpts) -> Result<(), CliError> {
    if p.ring.nvars() != 2 {
        return Err(CliError::Usage(
            "compare-classic is defined for two variables only".into(),
        ));
    }
    let config = p.run_config(&overrides(o));
    let trace = run_algorithm(&p.generators, &config)?;
    if let Status::Failed(reason) = &trace.status {
        return Err(CliError::Budget(reason.clone()));
    }
    let cmp = compare_classic(&trace, power_cap)?;
    let names = p.ring.names();
    match o.format {
        Format::Text => {
            println!("initial Jacobian: {}", cmp.initial);
            println!("radical generator: {}", cmp.radical);
            for (name, k) in names.iter().zip(&cmp.powers) {
                match k {
                    Some(k) => println!("classic: least k with {name}^k in J1 is {k}"),
                    None => println!("classic: no {name}^k in J1 for k <= {power_cap}"),
                }
            }
            println!("modified: {}", summary_line(&trace));
            println!("modified: largest root order {}", cmp.effective_root_order);
        }
        Format::Json => print_json(&json!({
            "initial": cmp.initial.to_string(),
            "radical": cmp.radical.to_string(),
            "classic_powers": names.iter().zip(&cmp.powers)
                .map(|(n, k)| (n.clone(), json!(k)))
                .collect::<serde_json::Map<_, _>>(),
            "modified": summary_json(&trace),
            "effective_root_order": cmp.effective_root_order,
        })),
    }
    Ok(())
}

fn cmd_audit(path: &Path, o: &GlobalOpts) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let trace = Trace::from_jsonl(&text).map_err(|e| CliError::Parse(e.to_string()))?;
    let report = audit_trace(&trace);
    match o.format {
        Format::Text => println!("{report}"),
        Format::Json => print_json(&json!({
            "steps_checked": report.steps_checked,
            "clean": report.is_clean(),
            "violation": report.violation.as_ref().map(|v| v.to_string()),
        })),
    }
    if report.is_clean() {
        Ok(())
    } else {
        Err(CliError::Failed("audit found a violation".into()))
    }
}

fn oracle_cap(gens: &[Polynomial], probe: u32, cap: Option<u32>, o: &GlobalOpts) -> Result<u32, CliError> {
    match cap {
        Some(c) => Ok(c),
        None => Ok(validity_cap(gens, probe, o.type_cap.unwrap_or(DEFAULT_TYPE_CAP))?),
    }
}

fn cmd_oracle(sub: &OracleCommand, o: &GlobalOpts) -> Result<(), CliError> {
    let (key, value) = match sub {
        OracleCommand::Member { problem, poly, cap } => {
            let p = Problem::load(problem)?;
            let target = p.parse_extra(poly)?;
            let probe = target.total_degree().unwrap_or(0);
            let cap = oracle_cap(&p.generators, probe, *cap, o)?;
            ("member", json!(member_linalg(&p.generators, &target, cap)?))
        }
        OracleCommand::Colength { problem, cap } => {
            let p = Problem::load(problem)?;
            let cap = oracle_cap(&p.generators, 0, *cap, o)?;
            ("colength", json!(colength_staircase(&p.generators, cap)?))
        }
        OracleCommand::Type { problem, cap } => {
            let p = Problem::load(problem)?;
            let cap = oracle_cap(&p.generators, 0, *cap, o)?;
            ("type", json!(type_bruteforce(&p.generators, cap)?))
        }
    };
    match o.format {
        Format::Text => println!("{value}"),
        Format::Json => print_json(&json!({ key: value })),
    }
    Ok(())
}
