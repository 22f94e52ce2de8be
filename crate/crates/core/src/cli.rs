//! Batch front end: run configuration, commands and artifact output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith::cusp::finite_order_census;
use crate::arith::{stabilizer, FiniteSubgroup, SubgroupSpec};
use crate::ell::{EllElem, Ext};
use crate::error::{Error, Result};
use crate::fq::Fq;
use crate::homology::{abelianization, check_homology, cusp_pieces, graph_of_groups};
use crate::ideal::{class_group, curve_point_count, BIdeal};
use crate::local::{apartment_vertex, build_ball, Ball};
use crate::poly::Poly;
use crate::quotient::cusps::{classify_stable, detect_cusp_rays, CuspReport};
use crate::quotient::euler::euler_report;
use crate::quotient::{label_ball, quotient_from_labels, BallLabels, GammaOrbits, QuotientGraph};
use crate::unitary::{boundary_act, fixed_boundary_point, group_closure, is_unipotent};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    TreeBall,
    Quotient,
    Euler,
    Cusps,
    Stabilizer,
    Abelianization,
    FixedPoint,
    ClassGroup,
    Census,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::TreeBall => "tree-ball",
            Command::Quotient => "quotient",
            Command::Euler => "euler",
            Command::Cusps => "cusps",
            Command::Stabilizer => "stabilizer",
            Command::Abelianization => "abelianization",
            Command::FixedPoint => "fixed-point",
            Command::ClassGroup => "class-group",
            Command::Census => "census",
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SubgroupKind {
    #[default]
    Gamma,
    Congruence,
}

/// An element a + b w of B, coefficient lists little-endian.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ElemSpec {
    #[serde(default)]
    pub a: Vec<i64>,
    #[serde(default)]
    pub b: Vec<i64>,
}

fn default_r() -> u32 {
    1
}
fn default_radius() -> usize {
    6
}
fn default_deg_bound() -> i64 {
    1
}
fn default_q_limit() -> usize {
    9
}
fn default_deg_d_limit() -> usize {
    3
}
fn default_order_bound() -> usize {
    64
}
fn default_max_window() -> i64 {
    10
}
fn default_vertex() -> i64 {
    2
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub p: u64,
    #[serde(default = "default_r")]
    pub r: u32,
    #[serde(default)]
    pub modulus: Option<Vec<i64>>,
    /// coefficients of D, little-endian, reduced mod p
    pub d: Vec<i64>,
    #[serde(default)]
    pub subgroup: SubgroupKind,
    /// generators of J for congruence subgroups
    #[serde(default)]
    pub j: Vec<ElemSpec>,
    #[serde(default = "default_radius")]
    pub radius: usize,
    #[serde(default = "default_deg_bound")]
    pub deg_bound: i64,
    #[serde(default = "default_q_limit")]
    pub q_limit: usize,
    /// bound on deg D for the class group
    #[serde(default = "default_deg_d_limit")]
    pub deg_d_limit: usize,
    /// census: largest element order looked for
    #[serde(default = "default_order_bound")]
    pub order_bound: usize,
    /// abelianization: largest unipotent window tried per cusp
    #[serde(default = "default_max_window")]
    pub max_window: i64,
    /// stabilizer and fixed-point: apartment vertex index
    #[serde(default = "default_vertex")]
    pub vertex: i64,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            p: 3,
            r: 1,
            modulus: None,
            d: vec![0, 1],
            subgroup: SubgroupKind::Gamma,
            j: Vec::new(),
            radius: default_radius(),
            deg_bound: default_deg_bound(),
            q_limit: default_q_limit(),
            deg_d_limit: default_deg_d_limit(),
            order_bound: default_order_bound(),
            max_window: default_max_window(),
            vertex: default_vertex(),
            out: None,
        }
    }
}

/// Validated context built from a configuration.
pub struct Setup {
    pub e: Ext,
    pub spec: SubgroupSpec,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(|x| Error::Validation(format!("config: {x}")))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).map_err(|x| Error::Validation(format!("{}: {x}", path.display())))?;
        Self::parse(&text)
    }

    pub fn setup(&self) -> Result<Setup> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Validation(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.deg_bound < 0 {
            return Err(Error::Validation("deg_bound must be nonnegative".into()));
        }
        let f = Fq::with_limit(self.p, self.r, self.modulus.as_deref(), self.q_limit)?;
        let d = Poly::from_ints(&f, &self.d);
        let e = Ext::new(f.clone(), d)?;
        let spec = match self.subgroup {
            SubgroupKind::Gamma => {
                if !self.j.is_empty() {
                    return Err(Error::Validation("generators of J given for subgroup = \"gamma\"".into()));
                }
                SubgroupSpec::Full
            }
            SubgroupKind::Congruence => {
                if self.j.is_empty() {
                    return Err(Error::Validation("congruence subgroup needs generators j".into()));
                }
                let gens = self
                    .j
                    .iter()
                    .map(|x| EllElem::from_polys(Poly::from_ints(&f, &x.a), Poly::from_ints(&f, &x.b)))
                    .collect();
                SubgroupSpec::congruence(BIdeal::new(&e, gens)?)
            }
        };
        Ok(Setup { e, spec })
    }
}

/// Result of one command: JSON document, optional DOT graph and summary.
pub struct Outcome {
    pub json: Value,
    pub dot: Option<String>,
    pub summary: String,
    pub provisional: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.provisional {
            3
        } else {
            0
        }
    }
}

fn spec_label(e: &Ext, spec: &SubgroupSpec) -> String {
    match spec.level() {
        None => "gamma".into(),
        Some(j) => format!("congruence {}", j.fmt(e)),
    }
}

fn header(cmd: Command, cfg: &RunConfig, s: &Setup) -> String {
    let f = s.e.fq();
    format!(
        "{}\nq = {}, D = {}, subgroup = {}\n",
        cmd.name(),
        f.q(),
        s.e.d().fmt_with(f),
        spec_label(&s.e, &s.spec)
    ) + &format!("radius = {}, deg_bound = {}\n\n", cfg.radius, cfg.deg_bound)
}

struct Quotient {
    ball: Ball,
    go: GammaOrbits,
    labels: BallLabels,
    qg: QuotientGraph,
    cusps: CuspReport,
}

fn quotient(s: &Setup, radius: usize) -> Result<Quotient> {
    let ball = build_ball(&s.e, radius)?;
    let mut go = GammaOrbits::new(&s.e)?;
    let labels = label_ball(&mut go, &ball)?;
    let qg = quotient_from_labels(&mut go, &ball, &labels, &s.spec)?;
    let cusps = detect_cusp_rays(&qg, &ball.parent);
    Ok(Quotient { ball, go, labels, qg, cusps })
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome> {
    let s = cfg.setup()?;
    let e = &s.e;
    let p = e.fq().p();
    let mut summary = header(cmd, cfg, &s);
    let mut dot = None;
    let mut provisional = false;
    let result = match cmd {
        Command::TreeBall => {
            let ball = build_ball(e, cfg.radius)?;
            let [v0, v1] = ball.valences();
            let valence = |v: &[usize]| {
                let mut x = v.to_vec();
                x.sort();
                x.dedup();
                x
            };
            let tree = ball.check_tree();
            if !tree {
                return Err(Error::Invariant("ball is not a tree".into()));
            }
            let _ = writeln!(summary, "vertices  {}", ball.len());
            let _ = writeln!(summary, "edges     {}", ball.edges().len());
            let _ = writeln!(summary, "valences  parity 0: {:?}, parity 1: {:?}", valence(&v0), valence(&v1));
            let mut g = String::from("graph ball {\n");
            for (a, b) in ball.edges() {
                let _ = writeln!(g, "  v{a} -- v{b};");
            }
            g.push_str("}\n");
            dot = Some(g);
            json!({
                "vertices": ball.len(),
                "edges": ball.edges().len(),
                "is_tree": tree,
                "valences": [valence(&v0), valence(&v1)],
                "depth_counts": (0..=cfg.radius).map(|d| ball.depth.iter().filter(|&&x| x == d).count()).collect::<Vec<_>>(),
            })
        }
        Command::Quotient | Command::Cusps => {
            let q = quotient(&s, cfg.radius)?;
            provisional = !q.cusps.uncertified.is_empty();
            let stable = classify_stable(&q.qg, &q.cusps.rays);
            dot = Some(q.qg.to_dot(&q.cusps.rays));
            let _ = writeln!(summary, "orbits          {}", q.qg.vertices.len());
            let _ = writeln!(summary, "edge orbits     {}", q.qg.edges.len());
            let _ = writeln!(summary, "cycle rank      {}", q.qg.cycle_rank());
            let _ = writeln!(summary, "certified rays  {}", q.cusps.rays.len());
            let _ = writeln!(summary, "uncertified     {}", q.cusps.uncertified.len());
            for r in &q.cusps.rays {
                let _ = writeln!(summary, "  ray {:?}", r.orders);
            }
            let mut out = json!({
                "cusps": q.cusps,
                "stable": stable,
                "cycle_rank": q.qg.cycle_rank(),
                "is_tree": q.qg.is_tree(),
            });
            if cmd == Command::Quotient {
                out["quotient"] = serde_json::to_value(q.qg.to_json(&q.cusps.rays)).expect("serializable");
            } else if matches!(s.spec, SubgroupSpec::Full) && e.deg_d() <= cfg.deg_d_limit {
                let cg = class_group(e, e.m() + 1, cfg.deg_d_limit)?;
                let _ = writeln!(summary, "class number    {}", cg.order);
                out["class_number"] = json!(cg.order);
                out["rays_match_class_number"] = json!(cg.order == q.cusps.rays.len());
            }
            out
        }
        Command::Euler => {
            let q = quotient(&s, cfg.radius)?;
            let reports = (1..=cfg.radius)
                .map(|w| euler_report(&q.qg.window(w), &s.spec, p, false))
                .collect::<Result<Vec<_>>>()?;
            let last = reports.last().expect("radius is positive");
            provisional = !last.stable;
            let _ = writeln!(summary, "{:>3} {:>8} {:>8} {:>8}  stable", "R", "l0", "l1", "chi");
            for x in &reports {
                let _ = writeln!(summary, "{:>3} {:>8} {:>8} {:>8}  {}", x.radius, x.l0, x.l1, x.chi, x.stable);
            }
            json!({ "reports": reports })
        }
        Command::Stabilizer => {
            let v = apartment_vertex(cfg.vertex);
            let st = stabilizer(e, &s.spec, &v)?;
            let gens = st.generators(e)?;
            let _ = writeln!(summary, "vertex   {}", cfg.vertex);
            let _ = writeln!(summary, "order    {}", st.order());
            let _ = writeln!(summary, "gens     {}", gens.len());
            json!({
                "vertex": v.to_json(),
                "order": st.order(),
                "generators": gens.iter().map(|g| g.to_json(e)).collect::<Vec<_>>(),
            })
        }
        Command::Abelianization => {
            if cfg.radius < 2 {
                return Err(Error::Validation("abelianization needs radius >= 2".into()));
            }
            let q = quotient(&s, cfg.radius)?;
            let gog = graph_of_groups(&q.go, &q.ball, &q.labels, &q.qg, &s.spec)?;
            let ab = abelianization(e, &gog)?;
            let _ = writeln!(summary, "free rank   {}", ab.free_rank);
            let _ = writeln!(summary, "torsion     {:?}", ab.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>());
            let mut out = json!({ "abelianization": ab });
            if let SubgroupSpec::Congruence(_) = s.spec {
                let euler = euler_report(&q.qg, &s.spec, p, false)?;
                provisional = !euler.stable || !q.cusps.uncertified.is_empty();
                let pieces = cusp_pieces(&q.go, &q.ball, &q.labels, &q.qg, &q.cusps.rays, &s.spec, cfg.max_window)?;
                let rep = check_homology(e, &q.qg, &euler, &ab, &pieces);
                let _ = writeln!(summary, "chi         {}", rep.chi);
                let _ = writeln!(summary, "steinberg   {}", rep.steinberg_rank);
                let _ = writeln!(summary, "cusp p-rank {}", rep.cusp_p_rank);
                let _ = writeln!(summary, "consistent  {}", rep.consistency);
                if !rep.consistency {
                    return Err(Error::Invariant("homology checks failed".into()));
                }
                out["report"] = serde_json::to_value(&rep).expect("serializable");
                out["cusp_pieces"] = serde_json::to_value(&pieces).expect("serializable");
            } else {
                provisional = !q.cusps.uncertified.is_empty();
            }
            out
        }
        Command::FixedPoint => {
            let v = apartment_vertex(cfg.vertex);
            let st = stabilizer(e, &s.spec, &v)?;
            let mut unip: Vec<_> = st.elements.iter().filter(|g| is_unipotent(e, g)).cloned().collect();
            unip.sort();
            let group = FiniteSubgroup { elements: unip };
            let gens = group.generators(e)?;
            if group_closure(e, &gens, group.order() + 1)?.len() != group.order() {
                return Err(Error::Precondition("unipotent elements of the stabilizer do not form a group".into()));
            }
            let xi = fixed_boundary_point(e, &gens, group.order() + 1)?;
            for g in &gens {
                if boundary_act(e, g, &xi)? != xi {
                    return Err(Error::Invariant("returned point is not fixed".into()));
                }
            }
            let _ = writeln!(summary, "vertex      {}", cfg.vertex);
            let _ = writeln!(summary, "group order {}", group.order());
            let _ = writeln!(summary, "fixed point {}", xi.fmt(e));
            json!({ "vertex": cfg.vertex, "order": group.order(), "generators": gens.len(), "point": xi.to_json(e) })
        }
        Command::ClassGroup => {
            let cg = class_group(e, e.m() + 1, cfg.deg_d_limit)?;
            let points = curve_point_count(e);
            let _ = writeln!(summary, "class number  {}", cg.order);
            let _ = writeln!(summary, "#C(F_q)       {points}");
            for r in &cg.representatives {
                let _ = writeln!(summary, "  {}", r.fmt(e));
            }
            json!({
                "order": cg.order,
                "point_count": points,
                "representatives": cg.representatives.iter().map(|r| r.to_json(e)).collect::<Vec<_>>(),
            })
        }
        Command::Census => {
            let c = finite_order_census(e, &s.spec, cfg.deg_bound, cfg.order_bound)?;
            let _ = writeln!(summary, "elements  {}", c.elements);
            for (o, n) in &c.orders {
                let _ = writeln!(summary, "  order {o:>3}: {n}");
            }
            let _ = writeln!(summary, "only {p}-power orders: {}", c.only_p_powers(p));
            json!({ "census": c, "only_p_powers": c.only_p_powers(p) })
        }
    };
    if provisional {
        summary.push_str("\nPROVISIONAL: window not stabilized\n");
    }
    let json = json!({
        "schema_version": SCHEMA_VERSION,
        "command": cmd.name(),
        "config": {
            "p": cfg.p, "r": cfg.r, "d": cfg.d, "subgroup": cfg.subgroup, "j": cfg.j,
            "radius": cfg.radius, "deg_bound": cfg.deg_bound,
        },
        "provisional": provisional,
        "result": result,
    });
    Ok(Outcome { json, dot, summary, provisional })
}

/// Writes `<command>.json`, `<command>.dot` and `summary.txt` into `dir`.
pub fn write_artifacts(dir: &Path, cmd: Command, out: &Outcome) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let text = serde_json::to_string_pretty(&out.json).expect("serializable") + "\n";
    fs::write(dir.join(format!("{}.json", cmd.name())), text)?;
    if let Some(d) = &out.dot {
        fs::write(dir.join(format!("{}.dot", cmd.name())), d)?;
    }
    fs::write(dir.join("summary.txt"), &out.summary)
}
