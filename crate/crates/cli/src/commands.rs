//! Producers: one function per subcommand turning a `RunConfig` into records,
//! plus the column layout each table is printed with.

use acl_core::asympt::{
    alternating_binomial_sum, product_main_term_check, technical2_check, technical_lemma_check,
};
use acl_core::fq::FieldSpec;
use acl_core::genfun::{chen1_ratio, chen7_closed, chen8_closed, closed_point_counts, hilb_counts, sym_counts};
use acl_core::peyre::{
    cm_constant, mu_for, peyre_constant_hilb2, peyre_constant_hilbm, peyre_constant_pn, GlobalFieldParams, PeyreValue,
};
use acl_core::quadfield::{enumerate_degree2, kt_main_term};
use acl_core::ratpoints::{count_exact_height, count_pairs_closed_subset, count_reducible_pairs, exact_height_formula};
use acl_core::real::{fixed_decimal, Real};
use acl_core::record::{params, parse_decimal, CountRecord, Quantity};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::config::{Command, PeyreKind, RunConfig};
use crate::error::CliError;
use crate::table::{Layout, Source};

/// Quadratic rows must lie within this fraction of the main term.
pub const QUADRATIC_TOLERANCE: (i64, i64) = (1, 2);
/// Lemma doubling rows pass when dev(2M)/dev(M) is within 1/2 of 1.
pub const DOUBLING_TOLERANCE: (i64, i64) = (1, 2);
const RATIO_PLACES: usize = 6;

fn frac(p: (i64, i64)) -> BigRational {
    BigRational::new(p.0.into(), p.1.into())
}

fn ten_pow_neg(d: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10).pow(d as u32))
}

pub fn layout(cmd: Command) -> Layout {
    use Source::*;
    Layout(match cmd {
        Command::CountRational => vec![
            ("q", Param("q")),
            ("n", Param("n")),
            ("M", Param("M")),
            ("observed", Observed),
            ("predicted", Predicted),
            ("match", Match),
        ],
        Command::CountPairs => vec![
            ("quantity", Label),
            ("q", Param("q")),
            ("M", Param("M")),
            ("observed", Observed),
            ("predicted", Predicted),
            ("match", Match),
        ],
        Command::CountQuadratic => vec![
            ("q", Param("q")),
            ("M", Param("M")),
            ("count", Observed),
            ("stable", Param("stable")),
            ("main_term", Predicted),
            ("ratio", Param("ratio")),
        ],
        Command::Cycles => vec![
            ("m", Param("m")),
            ("sym", Observed),
            ("hilb", Param("hilb")),
            ("primes", Param("primes")),
            ("chen7", Predicted),
            ("chen8", Param("chen8")),
            ("chen8_valid", Param("chen8_valid")),
            ("ratio_error", Param("ratio_error")),
        ],
        Command::Peyre(_) => vec![
            ("constant", Label),
            ("q", Param("q")),
            ("m", Param("m")),
            ("value", Observed),
            ("residual_bound", Param("residual_bound")),
            ("exact_prefactor", Param("exact_prefactor")),
            ("ln_power", Param("ln_power")),
            ("predicted", Predicted),
            ("match", Match),
        ],
        Command::VerifyLemmas => vec![
            ("lemma", Label),
            ("params", Param("params")),
            ("M", Param("M")),
            ("ratio_or_dev", Param("ratio_or_dev")),
            ("pass", Match),
        ],
    })
}

pub fn produce(cfg: &RunConfig) -> Result<Vec<CountRecord>, CliError> {
    match cfg.command {
        Command::CountRational => count_rational(cfg),
        Command::CountPairs => count_pairs(cfg),
        Command::CountQuadratic => count_quadratic(cfg),
        Command::Cycles => cycles(cfg),
        Command::Peyre(kind) => peyre(cfg, kind).map(|r| vec![r]),
        Command::VerifyLemmas => verify_lemmas(cfg),
    }
}

fn count_rational(cfg: &RunConfig) -> Result<Vec<CountRecord>, CliError> {
    let f = FieldSpec::new(cfg.q)?;
    (cfg.big_m..=cfg.big_m_max)
        .map(|m| {
            let obs = count_exact_height(cfg.n as usize, &f, m)?;
            Ok(CountRecord::exact(
                "count rational",
                params([("q", cfg.q as u64), ("n", cfg.n as u64), ("M", m as u64)]),
                Quantity::int(obs),
                Quantity::rational(exact_height_formula(cfg.n, cfg.q, m)),
            ))
        })
        .collect()
}

fn count_pairs(cfg: &RunConfig) -> Result<Vec<CountRecord>, CliError> {
    let f = FieldSpec::new(cfg.q)?;
    let mut out = Vec::new();
    for m in cfg.big_m..=cfg.big_m_max {
        let p = params([("q", cfg.q as u64), ("M", m as u64)]);
        let red = count_reducible_pairs(&f, m)?;
        out.push(CountRecord::exact("reducible", p.clone(), Quantity::rational(red.value), Quantity::rational(red.closed_form)));
        let sub = count_pairs_closed_subset(&f, m)?;
        out.push(CountRecord::exact("closed_subset", p, Quantity::rational(sub.value), Quantity::rational(sub.closed_form)));
    }
    Ok(out)
}

fn count_quadratic(cfg: &RunConfig) -> Result<Vec<CountRecord>, CliError> {
    let f = FieldSpec::new(cfg.q)?;
    let mut out = Vec::new();
    for m in cfg.big_m..=cfg.big_m_max {
        let c = enumerate_degree2(&f, m, cfg.bound)?;
        let main = kt_main_term(cfg.q, m);
        let tol = &main * frac(QUADRATIC_TOLERANCE);
        let mut p = params([("q", cfg.q as u64), ("M", m as u64)]);
        p.insert("stable".into(), c.stable.to_string());
        p.insert("ratio".into(), fixed_decimal(&c.ratio(), RATIO_PLACES));
        p.insert("orbits".into(), c.orbits.to_string());
        p.insert("bound".into(), format!("{}/{}", c.bound.d_deg, c.bound.coord_deg));
        out.push(CountRecord::new("count quadratic", p, Quantity::int(c.points()), Quantity::rational(main), tol));
    }
    Ok(out)
}

/// Rows whose `stable` flag is false.
pub fn unstable_rows(records: &[CountRecord]) -> Vec<String> {
    records
        .iter()
        .filter(|r| r.params.get("stable").map(String::as_str) == Some("false"))
        .map(|r| r.params.get("M").cloned().unwrap_or_default())
        .collect()
}

fn cycles(cfg: &RunConfig) -> Result<Vec<CountRecord>, CliError> {
    let m_max = cfg.m_max as usize;
    if m_max < 2 {
        return Err(CliError::Usage("--m-max must be at least 2".into()));
    }
    let sym = sym_counts(cfg.q, m_max)?;
    let hilb = hilb_counts(cfg.q, m_max)?;
    let primes = closed_point_counts(cfg.q, cfg.m_max);
    let mut out = Vec::new();
    for m in 2..=cfg.m_max {
        let c8 = chen8_closed(cfg.q, m)?;
        let c1 = chen1_ratio(cfg.q, m)?;
        let mi = m as usize;
        let mut p = params([("q", cfg.q as u64), ("m", m as u64)]);
        p.insert("hilb".into(), hilb[mi].to_string());
        p.insert("primes".into(), primes[mi].to_string());
        p.insert("chen8".into(), Quantity::rational(c8.value).to_string());
        p.insert("chen8_valid".into(), c8.valid.to_string());
        p.insert("ratio_error".into(), fixed_decimal(&c1.normalized_error, RATIO_PLACES));
        out.push(CountRecord::exact(
            "cycles",
            p,
            Quantity::int(sym[mi].clone()),
            Quantity::rational(chen7_closed(cfg.q, m)),
        ));
    }
    Ok(out)
}

/// Parses "a/b", an integer or a decimal.
pub fn parse_mu(s: &str) -> Result<BigRational, CliError> {
    let bad = || CliError::Usage(format!("cannot parse mu {s:?}"));
    let r = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (BigInt, BigInt) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if b.is_zero() {
                return Err(bad());
            }
            BigRational::new(a, b)
        }
        None => parse_decimal(s.trim()).ok_or_else(bad)?,
    };
    if !r.is_positive() {
        return Err(CliError::Usage("mu must be positive".into()));
    }
    Ok(r)
}

fn peyre_eval(cfg: &RunConfig, kind: PeyreKind, digits: usize) -> Result<PeyreValue, CliError> {
    let gp = GlobalFieldParams::rational(cfg.q);
    let mu = || -> Result<BigRational, CliError> {
        match &cfg.mu {
            Some(s) => parse_mu(s),
            None => mu_for(cfg.m).ok_or_else(|| CliError::Usage(format!("no tabulated mu for m = {}; pass --mu", cfg.m))),
        }
    };
    Ok(match kind {
        PeyreKind::Pn => peyre_constant_pn(cfg.n, &gp, digits)?,
        PeyreKind::Hilb2 => peyre_constant_hilb2(&gp, digits)?,
        PeyreKind::Hilbm => peyre_constant_hilbm(cfg.m, &mu()?, &gp, cfg.deg_cut, digits)?,
        PeyreKind::Cm => cm_constant(cfg.m, &mu()?, &gp, cfg.deg_cut, digits)?,
    })
}

/// `predicted` is the second reading where one exists (c_m), otherwise the
/// same constant recomputed with 20 more digits.
fn peyre(cfg: &RunConfig, kind: PeyreKind) -> Result<CountRecord, CliError> {
    let v = peyre_eval(cfg, kind, cfg.digits)?;
    let predicted = match &v.derived_value {
        Some(d) => d.clone(),
        None => peyre_eval(cfg, kind, cfg.digits + 20)?.value,
    };
    let d = cfg.digits;
    let tol = v.residual_bound.to_rational().abs() + ten_pow_neg(d);
    let (label, m) = match kind {
        PeyreKind::Pn => ("pn", "-".to_string()),
        PeyreKind::Hilb2 => ("hilb2", "2".to_string()),
        PeyreKind::Hilbm => ("hilbm", cfg.m.to_string()),
        PeyreKind::Cm => ("cm", cfg.m.to_string()),
    };
    let mut p = params([("q", cfg.q)]);
    p.insert("m".into(), m);
    if kind == PeyreKind::Pn {
        p.insert("n".into(), cfg.n.to_string());
    }
    p.insert("residual_bound".into(), sci(&v.residual_bound));
    p.insert("exact_prefactor".into(), Quantity::rational(v.exact_prefactor.clone()).to_string());
    p.insert("ln_power".into(), v.ln_power.to_string());
    Ok(CountRecord::new(label, p, Quantity::Real(v.value.to_fixed(d)), Quantity::Real(predicted.to_fixed(d)), tol))
}

fn sci(r: &Real) -> String {
    if r.is_zero() {
        "0".into()
    } else {
        format!("{:.3e}", r.to_f64())
    }
}

fn doubling_sequence(last: u32) -> Vec<u64> {
    let mut ms = vec![50u64];
    while ms.last().unwrap() * 2 <= last as u64 {
        ms.push(ms.last().unwrap() * 2);
    }
    ms
}

fn verify_lemmas(cfg: &RunConfig) -> Result<Vec<CountRecord>, CliError> {
    let (t, j) = (2u32, 1u32);
    if cfg.m <= t {
        return Err(CliError::Usage(format!("--m must exceed {t} for the technical sum")));
    }
    let ms = doubling_sequence(cfg.lemma_max());
    let mut out = Vec::new();
    let checks = ms
        .iter()
        .map(|&m| technical_lemma_check(cfg.q, t, j, cfg.m, m, cfg.digits))
        .collect::<Result<Vec<_>, _>>()?;
    let tp = format!("q={};t={t};j={j};m={}", cfg.q, cfg.m);
    for (name, devs) in [
        ("technical", checks.iter().map(|c| c.dev.clone()).collect::<Vec<_>>()),
        ("technical-geometric", checks.iter().map(|c| c.dev_geometric.clone()).collect()),
    ] {
        for (i, w) in devs.windows(2).enumerate() {
            let ratio = w[1].to_rational() / w[0].to_rational();
            let mut p = params([("params", tp.clone()), ("M", ms[i + 1].to_string())]);
            p.insert("ratio_or_dev".into(), w[1].to_fixed(RATIO_PLACES));
            out.push(CountRecord::new(
                name,
                p,
                Quantity::Real(fixed_decimal(&ratio, RATIO_PLACES)),
                Quantity::int(1),
                frac(DOUBLING_TOLERANCE),
            ));
        }
    }
    let exact_row = |name: &str, ps: String, m: u64, ratio: BigRational, slack: u32| {
        let mut p = params([("params", ps), ("M", m.to_string())]);
        p.insert("ratio_or_dev".into(), fixed_decimal(&ratio, RATIO_PLACES + 4));
        CountRecord::new(name, p, Quantity::rational(ratio), Quantity::int(1), BigRational::new(slack.into(), m.into()))
    };
    for k in [1u32, 3, 5] {
        for &m in &ms {
            out.push(exact_row("technical2", format!("k={k}"), m, technical2_check(k, m)?, k + 2));
        }
    }
    for (rv, rw) in [(2u32, 2u32), (3, 1), (3, 2)] {
        for &m in &ms {
            out.push(exact_row("product", format!("rV={rv};rW={rw}"), m, product_main_term_check(rv, rw, m)?, rv + rw));
        }
    }
    for k in 1..=8u32 {
        let mut p = params([("params", format!("k={k}")), ("M", "-".into())]);
        let s = alternating_binomial_sum(k);
        p.insert("ratio_or_dev".into(), s.to_string());
        out.push(CountRecord::exact("binomial", p, Quantity::int(s), Quantity::int(0)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn mu_parsing() {
        assert_eq!(parse_mu("3/2").unwrap(), BigRational::new(3.into(), 2.into()));
        assert_eq!(parse_mu("1").unwrap(), rat(1));
        assert_eq!(parse_mu("0.5").unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(parse_mu("0").is_err());
        assert!(parse_mu("1/0").is_err());
        assert!(parse_mu("x").is_err());
    }

    #[test]
    fn doubling() {
        assert_eq!(doubling_sequence(400), vec![50, 100, 200, 400]);
        assert_eq!(doubling_sequence(10), vec![50]);
    }
}
