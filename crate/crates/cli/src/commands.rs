use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use kacmoody::building::{render_svg, Building, Chamber};
use kacmoody::chabauty::{boundedness_check, conjugate_stabilizer_limit};
use kacmoody::report::{all_passed, to_csv};
use kacmoody::rootdata::{
    abelian_radical_condition, coxeter_exponent, coxeter_matrix_of, enumerate_admissible_gcms, fuchsian_admissible,
    is_dihedrally_closed, FuchsianParams,
};
use kacmoody::treewall::{decomposition_check, property_suite, proximality_demo, sylow_ball_check, End};
use kacmoody::weyl::{
    expand_rational, fuchsian_closed_form, growth_coefficients, lattice_criterion, normal_form, order_of_product,
    partial_sum, partial_sum_evidence, prenilpotent_pair, rational_to_f64, verify_certificate, LatticeVerdict,
    PrenilpotencyVerdict, RootVector, DEFAULT_ELEMENT_LIMIT,
};
use kacmoody::{CheckReport, Fq, Gcm, LaurentMatrix, Series};

use crate::config::{Cli, Command, Settings};

/// Terms of the growth series used for the partial-sum cross-check.
const PARTIAL_SUM_TERMS: usize = 200;
const COXETER_CUTOFF: u64 = 1000;
const PRENILPOTENCY_DEPTH: usize = 8;
const LINK_SAMPLES: usize = 20;
const PRESENTATION_SAMPLES: usize = 1000;
const DECOMPOSITION_SAMPLES: usize = 200;
const DEFAULT_SEED: u64 = 1;

struct Output {
    name: &'static str,
    passed: bool,
    body: Value,
    anchors: Value,
    tables: Vec<(String, String)>,
    svg: Option<(PathBuf, String)>,
}

impl Output {
    fn report(&self, settings: &Settings) -> Value {
        json!({
            "command": self.name,
            "version": env!("CARGO_PKG_VERSION"),
            "config": settings,
            "passed": self.passed,
            "anchors": self.anchors,
            "result": self.body,
        })
    }

    fn write(&self, settings: &Settings) -> Result<()> {
        if let Some(dir) = &settings.out {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(format!("{}.json", self.name));
            fs::write(&path, pretty(&self.report(settings))?).with_context(|| format!("writing {}", path.display()))?;
            for (file, csv) in &self.tables {
                let path = dir.join(file);
                fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        if let Some((path, svg)) = &self.svg {
            fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}

fn pretty(v: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

pub fn run(cli: &Cli) -> Result<bool> {
    let settings = Settings::resolve(&cli.opts)?;
    let outputs = match cli.command {
        Command::All => {
            vec![growth(&settings)?, gcm(&settings)?, building(&settings)?, treewall(&settings)?, chabauty(&settings)?]
        }
        Command::Growth => vec![growth(&settings)?],
        Command::Gcm => vec![gcm(&settings)?],
        Command::Building => vec![building(&settings)?],
        Command::Treewall => vec![treewall(&settings)?],
        Command::Chabauty => vec![chabauty(&settings)?],
    };
    for o in &outputs {
        o.write(&settings)?;
    }
    let passed = outputs.iter().all(|o| o.passed);
    let stdout = if let [single] = outputs.as_slice() {
        single.report(&settings)
    } else {
        let results: serde_json::Map<String, Value> =
            outputs.iter().map(|o| (o.name.to_string(), o.report(&settings))).collect();
        json!({
            "command": "all",
            "version": env!("CARGO_PKG_VERSION"),
            "config": settings,
            "passed": passed,
            "results": results,
        })
    };
    print!("{}", pretty(&stdout)?);
    Ok(passed)
}

#[derive(Serialize)]
struct GrowthRow {
    n: usize,
    bfs: u64,
    closed_form: String,
    equal: bool,
}

#[derive(Serialize)]
struct LatticeRow {
    q: u32,
    verdict: &'static str,
    value: Option<String>,
    partial_sum: String,
    evidence: Option<bool>,
}

fn growth(s: &Settings) -> Result<Output> {
    let r = s.r.unwrap_or(5);
    let n = s.depth.unwrap_or(8) as usize;
    let gcm = Gcm::right_angled(r, -2)?;
    let bfs = growth_coefficients(&gcm, n, DEFAULT_ELEMENT_LIMIT)?;
    let (num, den) = fuchsian_closed_form(r)?;
    let closed = expand_rational(&num, &den, n.max(PARTIAL_SUM_TERMS))?;

    let mut agree = CheckReport::new("growth_agreement", json!({"r": r, "degree": n}));
    let rows: Vec<GrowthRow> = bfs
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let equal = closed[k] == a.into();
            agree.record(equal, || format!("a_{k}: {a} vs {}", closed[k]));
            GrowthRow { n: k, bfs: a, closed_form: closed[k].to_string(), equal }
        })
        .collect();

    let mut lattice = CheckReport::new("lattice_criterion", json!({"r": r, "terms": PARTIAL_SUM_TERMS}));
    let mut verdicts = Vec::new();
    for q in s.qs(&[2, 3]) {
        let verdict = lattice_criterion(r, q as u64)?;
        let evidence = partial_sum_evidence(&closed, q as u64);
        let is_lattice = matches!(verdict, LatticeVerdict::Lattice { .. });
        lattice.record(evidence.is_none_or(|e| e == is_lattice), || {
            format!("q={q}: verdict {is_lattice}, partial sums say {evidence:?}")
        });
        lattice.record(is_lattice == (q as usize + 2 >= r), || format!("q={q}: verdict {is_lattice}"));
        let value = match &verdict {
            LatticeVerdict::Lattice { value } => Some(value.to_string()),
            LatticeVerdict::NotLattice => None,
        };
        verdicts.push(LatticeRow {
            q,
            verdict: if is_lattice { "lattice" } else { "not_lattice" },
            value,
            partial_sum: format!("{:.9e}", rational_to_f64(&partial_sum(&closed, q as u64))),
            evidence,
        });
    }
    let checks = vec![agree, lattice];
    Ok(Output {
        name: "growth",
        passed: all_passed(&checks),
        body: json!({"r": r, "rows": rows, "lattice": verdicts, "checks": checks}),
        anchors: json!({
            "growth_agreement": "growth series (1+t)^2 / (1-(r-2)t+t^2) of the r-gon reflection group",
            "lattice_criterion": "W(1/q) finite iff q >= r-2",
        }),
        tables: vec![("growth.csv".into(), to_csv(&rows)?), ("lattice.csv".into(), to_csv(&verdicts)?)],
        svg: None,
    })
}

fn load_gcm(s: &Settings) -> Result<(Gcm, bool)> {
    match &s.gcm_file {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let g: Gcm = serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
            if let Some(r) = s.r {
                if r != g.rank() {
                    bail!("--r {r} disagrees with the rank {} of {}", g.rank(), p.display());
                }
            }
            Ok((g, true))
        }
        None => Ok((Gcm::right_angled(s.r.unwrap_or(5), -2)?, false)),
    }
}

fn gcm(s: &Settings) -> Result<Output> {
    let (g, from_file) = load_gcm(s)?;
    let n = g.rank();
    let cox = coxeter_matrix_of(&g);
    let coxeter: Vec<Vec<String>> = (0..n).map(|i| (0..n).map(|j| cox.get(i, j).to_string()).collect()).collect();

    let mut oracle = CheckReport::new("coxeter_oracle", json!({"cutoff": COXETER_CUTOFF}));
    for i in 0..n {
        for j in (i + 1)..n {
            let rule = coxeter_exponent(g.get(i, j), g.get(j, i))?;
            let computed = order_of_product(&g, i, j, COXETER_CUTOFF);
            oracle.record(computed.as_ref().ok() == Some(&rule), || {
                format!("({i},{j}): rule {rule}, computed {computed:?}")
            });
        }
    }
    let mut checks = vec![oracle];

    let admissibility = if n >= 5 { Some(fuchsian_admissible(&g, n)?) } else { None };
    let radical: Vec<bool> =
        if n >= 3 { (0..n).map(|i| abelian_radical_condition(&g, i)).collect() } else { Vec::new() };

    let mut pairs = Vec::new();
    if n >= 3 {
        let mut cert = CheckReport::new("prenilpotency_certificates", json!({"depth": PRENILPOTENCY_DEPTH}));
        let a0 = RootVector::simple(&g, 0)?.neg();
        let a2 = RootVector::simple(&g, 2)?.neg();
        let b = a2.apply(&normal_form(&g, &[0])?)?;
        for (label, x, y) in [("-a0, -a2", &a0, &a2), ("-a0, s0(-a2)", &a0, &b)] {
            let v = prenilpotent_pair(&g, x, y, PRENILPOTENCY_DEPTH)?;
            if !matches!(v, PrenilpotencyVerdict::Unknown { .. }) {
                let ok = verify_certificate(&g, x, y, &v)?;
                cert.record(ok, || format!("certificate for {{{label}}} does not verify"));
            }
            pairs.push(json!({"pair": label, "a": x, "b": y, "verdict": v}));
        }
        checks.push(cert);
    }

    let mut family = Value::Null;
    if !from_file && n >= 5 {
        let bound = 3;
        let gcms = enumerate_admissible_gcms(n, bound, 1_000_000)?;
        let mut closed = CheckReport::new("dihedral_closure", json!({"r": n, "coeff_bound": bound}));
        closed.record(is_dihedrally_closed(&gcms), || "enumeration is not closed under relabeling".into());
        closed.record(gcms.iter().all(|m| fuchsian_admissible(m, n).map(|a| a.admissible).unwrap_or(false)), || {
            "an enumerated matrix is not admissible".into()
        });
        checks.push(closed);
        family = json!({"coeff_bound": bound, "count": gcms.len()});
    }

    let growth = growth_coefficients(&g, s.depth.unwrap_or(6) as usize, DEFAULT_ELEMENT_LIMIT)?;
    Ok(Output {
        name: "gcm",
        passed: all_passed(&checks),
        body: json!({
            "gcm": g,
            "symmetric": g.is_symmetric(),
            "coxeter_matrix": coxeter,
            "admissibility": admissibility,
            "abelian_radical": radical,
            "growth": growth,
            "root_pairs": pairs,
            "admissible_family": family,
            "checks": checks,
        }),
        anchors: json!({
            "coxeter_oracle": "m_ij = 2, 3, 4, 6, inf for a_ij a_ji = 0, 1, 2, 3, >= 4",
            "prenilpotency_certificates": "non-prenilpotent pairs of real roots in the Fuchsian root system",
            "dihedral_closure": "admissible matrices up to symmetries of the polygon",
        }),
        tables: Vec::new(),
        svg: None,
    })
}

#[derive(Serialize)]
struct BallRow {
    distance: usize,
    chambers: u64,
    cumulative: u64,
    expected: u64,
}

fn building(s: &Settings) -> Result<Output> {
    let r = s.r.unwrap_or(5);
    let q = s.qs(&[2]);
    let params = FuchsianParams::new(r, q)?;
    let depth = s.depth.unwrap_or(2) as usize;
    let seed = s.seed.unwrap_or(DEFAULT_SEED);
    let b = Building::new(params.clone())?;
    let audit = b.audit(depth, LINK_SAMPLES, seed)?;
    let mut checks = audit.checks.clone();
    checks.push(b.verify_presentation(PRESENTATION_SAMPLES, seed)?);

    let mut by_type = CheckReport::new("links_by_type", json!({"q": params.q}));
    let mut shapes = Vec::new();
    for i in 0..r {
        let j = (i + 1) % r;
        let link = b.link(&Chamber::base(), i)?;
        let (left, right) = (params.q[j] as usize + 1, params.q[i] as usize + 1);
        by_type.record(link.is_complete_bipartite(left, right), || {
            format!("type {{{i},{j}}}: {}x{} panels", link.left, link.right)
        });
        shapes.push(json!({"types": [i, j], "shape": format!("K_{{{},{}}}", link.left, link.right)}));
    }
    checks.push(by_type);

    let mut cumulative = 0;
    let rows: Vec<BallRow> = audit
        .counts
        .iter()
        .zip(&audit.expected)
        .enumerate()
        .map(|(d, (&c, &e))| {
            cumulative += c;
            BallRow { distance: d, chambers: c, cumulative, expected: e }
        })
        .collect();
    let svg = match &s.svg {
        Some(p) => Some((p.clone(), render_svg(r, depth)?)),
        None => None,
    };
    Ok(Output {
        name: "building",
        passed: all_passed(&checks),
        body: json!({
            "r": r,
            "q": params.q,
            "depth": depth,
            "seed": seed,
            "ball": rows,
            "links": shapes,
            "checks": checks,
        }),
        anchors: json!({
            "ball_sizes": "chambers at distance n number the sum over words of length n of the products of q_i",
            "panel_sizes": "panels of type i have 1 + q_i chambers",
            "links": "vertex links are complete bipartite graphs K_{1+q_{i+1}, 1+q_i}",
            "presentation": "graph product of cyclic groups of order 1 + q_i over the r-cycle",
        }),
        tables: vec![("building.csv".into(), to_csv(&rows)?)],
        svg,
    })
}

#[derive(Serialize)]
struct CheckRow {
    q: u32,
    check: String,
    passed: bool,
    cases: u64,
}

fn treewall(s: &Settings) -> Result<Output> {
    let depth = s.depth.unwrap_or(6);
    let window = s.window.unwrap_or(8);
    let n_max = s.nmax.unwrap_or(depth as i64);
    let seed = s.seed.unwrap_or(DEFAULT_SEED);
    let mut per_q = Vec::new();
    let mut rows = Vec::new();
    let mut passed = true;
    for q in s.qs(&[2]) {
        let f = Fq::new(q)?;
        let mut checks = property_suite(&f, depth, window)?;
        checks.extend(decomposition_check(&f, depth.min(6), DECOMPOSITION_SAMPLES, seed)?);
        let sylow = sylow_ball_check(&f, depth.min(if q <= 3 { 4 } else { 2 }))?;
        let ends = [
            End::Xi,
            End::Point(Series::one()),
            End::Point(Series::monomial(1, -1)),
            End::Point(Series::from_terms(&[(-2, 1), (1, 1)], None, &f)),
        ];
        let proximality = proximality_demo(&ends, n_max, depth)?;
        passed &= all_passed(&checks) && sylow.passed && proximality.passed;
        for c in &checks {
            rows.push(CheckRow { q, check: c.name.clone(), passed: c.passed, cases: c.cases });
        }
        rows.push(CheckRow { q, check: "sylow".into(), passed: sylow.passed, cases: 1 });
        rows.push(CheckRow { q, check: "proximality".into(), passed: proximality.passed, cases: ends.len() as u64 });
        per_q.push(json!({"q": q, "checks": checks, "sylow": sylow, "proximality": proximality}));
    }
    Ok(Output {
        name: "treewall",
        passed,
        body: json!({"depth": depth, "window": window, "n_max": n_max, "seed": seed, "fields": per_q}),
        anchors: json!({
            "horoball": "V_n fixes the horoball at xi of level n; U_{a_n} is simply transitive on upward edges",
            "intersection": "the intersection of the V_{-n} is trivial",
            "exponent_p_abelian": "V is abelian of exponent p",
            "tau_normalizes_v": "conjugation by tau multiplies parameters by t^{-2}",
            "decompose_p_xi": "P_xi = K_L <tau> V",
            "sylow": "the edge stabilizer has a unique pro-p Sylow subgroup and is its normalizer",
            "proximality": "tau attracts every end other than its repelling one",
        }),
        tables: vec![("treewall.csv".into(), to_csv(&rows)?)],
        svg: None,
    })
}

#[derive(Serialize)]
struct LimitRow {
    q: u32,
    level: u32,
    n: usize,
    order: usize,
    target_order: usize,
    unipotent_order: usize,
}

fn chabauty(s: &Settings) -> Result<Output> {
    let level = s.depth.unwrap_or(3);
    let n_max = s.nmax.unwrap_or(8);
    let window = s.window.unwrap_or(24);
    let mut per_q = Vec::new();
    let mut rows = Vec::new();
    let mut passed = true;
    for q in s.qs(&[2]) {
        let rep = conjugate_stabilizer_limit(q, level, n_max, window)?;
        let f = Fq::new(q)?;
        let g1 = LaurentMatrix::upper(Series::monomial(1, -1));
        let s1 = Series::one().add(&Series::monomial(1, 1), &f).truncate(window);
        let g2 = LaurentMatrix::torus(&s1, window, &f)?
            .mul(&LaurentMatrix::upper(Series::from_terms(&[(-2, 1), (0, 1)], None, &f)), &f);
        let bounded =
            vec![boundedness_check(&g1, q, n_max.max(1), level)?, boundedness_check(&g2, q, n_max.max(1), level)?];
        passed &= rep.passed && all_passed(&bounded);
        for (n, (&order, &u)) in rep.orders.iter().zip(&rep.unipotent_orders).enumerate() {
            rows.push(LimitRow { q, level, n, order, target_order: rep.target_order, unipotent_order: u });
        }
        per_q.push(json!({"q": q, "limit": rep, "boundedness": bounded}));
    }
    Ok(Output {
        name: "chabauty",
        passed,
        body: json!({"level": level, "n_max": n_max, "window": window, "fields": per_q}),
        anchors: json!({
            "limit_identity": "lim tau^n Stab(v) tau^{-n} = D_xi in the Chabauty topology; lim tau^{-n} u tau^n = 1",
            "d_xi_inclusions": "the limit contains K_L and every V_m",
            "boundedness": "tau^{-n} g tau^n stays bounded for g in D_xi",
        }),
        tables: vec![("chabauty.csv".into(), to_csv(&rows)?)],
        svg: None,
    })
}
