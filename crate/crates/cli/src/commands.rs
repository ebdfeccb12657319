use std::collections::BTreeMap;
use std::path::Path;

use cayleylab::cayley::{ball_to_dot, ball_to_json, classify_growth, growth_table, growth_to_csv};
use cayleylab::graph::{bfs, BfsLimits};
use cayleylab::group::{verify_ping_pong, PingPongCertificate, SubgroupSpec};
use cayleylab::hyperbolicity::{divergence_profile, estimate_delta, morse_check, sweep_to_csv, HyperbolicityReport};
use cayleylab::qi::{check_net, fit_qi_constants, fit_qi_constants_with, quasi_action_probe, resolve_sample, FitOptions, MapRecord, PartialMap, QiFit};
use cayleylab::relhyp::{bcp_test, build_coned_off, coned_to_dot, coset_hausdorff_probe, geodesic_corpus, BcpVerdict, ConedOffBall};
use cayleylab::treegraded::{chord_division, folner_search, FolnerOptions, FolnerOutcome, TreeGradedGraph};
use cayleylab::{CayleyBall, Letter, Presentation, Word};
use clap::ValueEnum;
use serde_json::json as j;

use crate::output::{json, table, unsupported, CliError, CliResult, Format, Report};
use crate::{Command, GroupArgs, RunConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SetRule {
    /// Attracting sets by first letter of the reduced word (free groups).
    Prefix,
    /// Attracting sets by dominant exponent-sum direction (abelian groups).
    Cones,
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn load_group(g: &GroupArgs) -> CliResult<Presentation> {
    match (&g.group, &g.presentation) {
        (Some(spec), _) => Ok(Presentation::from_spec(spec)?),
        (None, Some(path)) => Ok(Presentation::parse_file(&read(path)?)?),
        (None, None) => Err(CliError::Usage("one of --group or --presentation is required".into())),
    }
}

fn words(p: &Presentation, text: &str) -> CliResult<Vec<Word>> {
    let out: Vec<Word> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| p.parse_word(s))
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err(CliError::Usage(format!("expected at least one word, found `{text}`")));
    }
    Ok(out)
}

fn numbers(text: &str) -> CliResult<Vec<usize>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::Usage(format!("malformed number `{s}`"))))
        .collect()
}

fn element(b: &CayleyBall, text: &str) -> CliResult<usize> {
    Ok(b.vertex_str(text)?)
}

/// Vertices visited by the steps in `moves`, starting at `start`.
fn walk(b: &CayleyBall, start: &str, moves: &str) -> CliResult<Vec<usize>> {
    let p = b.presentation();
    let mut v = element(b, start)?;
    let mut out = vec![v];
    for step in words(p, moves)? {
        let w = p.multiply(b.word(v), &step)?;
        v = b.vertex(&w)?;
        out.push(v);
    }
    Ok(out)
}

fn peripherals(p: &Presentation, given: &[String]) -> CliResult<Vec<SubgroupSpec>> {
    if given.is_empty() {
        return Ok(p.peripherals().to_vec());
    }
    let base = p.without_peripherals();
    given.iter().map(|g| Ok(SubgroupSpec::new(&base, words(&base, g)?)?)).collect()
}

fn labels(b: &CayleyBall, vs: &[usize]) -> Vec<String> {
    vs.iter().map(|&v| b.word_string(v)).collect()
}

fn exponent_sums(n: usize, w: &Word) -> Vec<i64> {
    let mut e = vec![0; n];
    for l in w.letters() {
        e[l.generator()] += if l.is_inverse() { -1 } else { 1 };
    }
    e
}

pub fn run(cfg: &RunConfig) -> CliResult<Report> {
    let f = cfg.format;
    let name = cfg.command.name();
    match &cfg.command {
        Command::Ball { group, radius } => {
            let p = load_group(group)?;
            let b = CayleyBall::build(&p, *radius)?;
            Ok(Report::ok(match f {
                Format::Json => ball_to_json(&b),
                Format::Dot => ball_to_dot(&b),
                Format::Csv => {
                    let mut out = String::from("vertex,word,dist\n");
                    for v in 0..b.len() {
                        out.push_str(&format!("{v},{},{}\n", b.word_string(v), b.dist0(v)));
                    }
                    out
                }
                Format::Table => {
                    let spheres: Vec<String> = (0..=*radius).map(|n| b.layer(n).len().to_string()).collect();
                    table(&[
                        ("group", p.describe()),
                        ("radius", radius.to_string()),
                        ("vertices", b.len().to_string()),
                        ("degree", b.degree().to_string()),
                        ("spheres", spheres.join(" ")),
                    ])
                }
            }))
        }
        Command::Growth { group, radius } => {
            let p = load_group(group)?;
            let t = growth_table(&p, *radius)?;
            let class = classify_growth(&t).ok();
            Ok(Report::ok(match f {
                Format::Csv => growth_to_csv(&t),
                Format::Json => json(&j!({ "group": p.describe(), "radius": radius, "ball": t.ball, "sphere": t.sphere, "class": class })),
                Format::Table => {
                    let mut out = String::from("n  ball  sphere\n");
                    for n in 0..t.ball.len() {
                        out.push_str(&format!("{n}  {}  {}\n", t.ball[n], t.sphere[n]));
                    }
                    out.push_str(&match class {
                        Some(c) => format!("class  {}\n", serde_json::to_string(&c).unwrap()),
                        None => "class  (table too short)\n".to_string(),
                    });
                    out
                }
                Format::Dot => return Err(unsupported(name, f)),
            }))
        }
        Command::Distance { group, from, to, radius } => {
            let p = load_group(group)?;
            let (u, v) = (p.parse_word(from)?, p.parse_word(to)?);
            let w = p.multiply(&p.invert(&u)?, &v)?;
            let b = CayleyBall::build(&p, *radius)?;
            let d = b.find(&w)?.map(|x| b.dist0(x));
            Ok(Report::ok(match f {
                Format::Json => json(&j!({ "from": from, "to": to, "radius": radius, "distance": d })),
                Format::Csv => format!("from,to,distance\n{from},{to},{}\n", d.map_or(format!(">{radius}"), |d| d.to_string())),
                Format::Table => table(&[("distance", d.map_or(format!("> {radius}"), |d| d.to_string()))]),
                Format::Dot => return Err(unsupported(name, f)),
            }))
        }
        Command::QiFit { map, l_max, c_budget } => {
            let m = MapRecord::from_json(&read(map)?)?.to_map()?;
            let fit = fit_qi_constants_with(&m, FitOptions { l_max: *l_max, c_budget: *c_budget })?;
            let fitted = matches!(fit, QiFit::Fitted(_));
            let text = match (f, &fit) {
                (Format::Json, _) => json(&fit),
                (Format::Table, QiFit::Fitted(k)) => table(&[
                    ("result", "fitted".into()),
                    ("L", k.l.to_string()),
                    ("C", k.c.to_string()),
                    ("coverage", k.coverage.to_string()),
                    ("witnesses", k.witnesses.len().to_string()),
                ]),
                (Format::Table, QiFit::NotEmbedding { l_max, best_c }) => {
                    table(&[("result", "not an embedding".into()), ("l_max", l_max.to_string()), ("best_c", best_c.to_string())])
                }
                _ => return Err(unsupported(name, f)),
            };
            Ok(Report::verdict(text, fitted))
        }
        Command::TreeQi { valence, radius } => {
            let t = cayleylab::qi::build_tree_qi(*valence, *radius)?;
            let m = &t.map;
            let k = *valence as u64 - 2;
            let mut violations = 0u64;
            for x in 0..m.domain.len() {
                for y in x + 1..m.domain.len() {
                    let (dx, dy) = (m.domain.d(x, y) as u64, m.range.d(m.assignment[x], m.assignment[y]) as u64);
                    if dx > k * (dy + 1) || dy > dx {
                        violations += 1;
                    }
                }
            }
            let text = match f {
                Format::Json => MapRecord::from_map(m).to_json(),
                Format::Table => {
                    let fit = match fit_qi_constants(m)? {
                        QiFit::Fitted(c) => format!("L = {}, C = {}", c.l, c.c),
                        QiFit::NotEmbedding { .. } => "not an embedding".into(),
                    };
                    table(&[
                        ("domain", format!("{} ({} vertices)", m.domain.id(), m.domain.len())),
                        ("image", format!("{} vertices", m.range.len())),
                        ("violations", violations.to_string()),
                        ("fit", fit),
                    ])
                }
                _ => return Err(unsupported(name, f)),
            };
            Ok(Report::verdict(text, violations == 0))
        }
        Command::NetCheck { sample, net, delta, epsilon } => {
            let x = resolve_sample(sample)?;
            let net = numbers(net)?;
            if let Some(bad) = net.iter().find(|&&i| i >= x.len()) {
                return Err(CliError::Usage(format!("net point {bad} is not in `{sample}` ({} points)", x.len())));
            }
            let r = check_net(&x, &net, *delta, *epsilon);
            let text = match f {
                Format::Json => json(&r),
                Format::Table => table(&[
                    ("separated", r.separated.to_string()),
                    ("covering", r.covering.to_string()),
                    ("separation witness", format!("{:?}", r.separation_witness)),
                    ("covering witness", format!("{:?}", r.covering_witness)),
                ]),
                _ => return Err(unsupported(name, f)),
            };
            Ok(Report::verdict(text, r.passed()))
        }
        Command::QuasiAction {
            group,
            lambda_group,
            images,
            lambda_radius,
            radius,
            probe_radius,
            lambda_probe_radius,
            kernel_bound,
        } => {
            let p = load_group(group)?;
            let lp = Presentation::from_spec(lambda_group)?;
            let images = words(&p, images)?;
            if images.len() != lp.generator_count() {
                return Err(CliError::Usage(format!("{} images given for {} generators of Λ", images.len(), lp.generator_count())));
            }
            let lb = CayleyBall::build(&lp, *lambda_radius)?;
            let gb = CayleyBall::build(&p, *radius)?;
            let mut q = Vec::with_capacity(lb.len());
            for v in 0..lb.len() {
                let image = lb.word(v).letters().iter().fold(Word::empty(), |acc, l| {
                    let w = &images[l.generator()];
                    acc.concat(&if l.is_inverse() { w.inverse() } else { w.clone() })
                });
                q.push(gb.find(&image)?);
            }
            // q̄ sends each point of G to a preimage of its nearest image point.
            let mut preimage: BTreeMap<usize, usize> = BTreeMap::new();
            for (v, x) in q.iter().enumerate() {
                if let Some(x) = x {
                    preimage.entry(*x).or_insert(v);
                }
            }
            if preimage.is_empty() {
                return Err(CliError::Usage("no image point lies in the G ball".into()));
            }
            let sources: Vec<usize> = preimage.keys().copied().collect();
            let near = bfs(&gb, &sources, BfsLimits::default());
            let qbar = PartialMap {
                assignment: (0..gb.len()).map(|x| near.path_to(x).map(|path| preimage[&path[0]])).collect(),
            };
            let q = PartialMap { assignment: q };
            let lambdas: Vec<usize> = lb.sub_ball((*lambda_probe_radius).min(lb.radius())).collect();
            let probes: Vec<usize> = gb.sub_ball((*probe_radius).min(gb.radius())).collect();
            let r = quasi_action_probe(&lb, &gb, &q, &qbar, &lambdas, &probes, *kernel_bound)?;
            Ok(Report::ok(match f {
                Format::Json => json(&r),
                Format::Table => table(&[
                    ("D", r.d.to_string()),
                    ("probes", r.probes.to_string()),
                    ("kernel bound", r.kernel_bound.to_string()),
                    ("kernel", r.kernel.join(" ")),
                ]),
                _ => return Err(unsupported(name, f)),
            }))
        }
        Command::Delta { group, radius, sweep, samples, peripheral } => {
            let p = load_group(group)?;
            let mut radii = vec![*radius];
            if let Some(s) = sweep {
                radii.extend(numbers(s)?);
            }
            let specs = if peripheral.is_empty() { Vec::new() } else { peripherals(&p, peripheral)? };
            let mut reports: Vec<HyperbolicityReport> = Vec::new();
            for &r in &radii {
                let b = CayleyBall::build(&p, r)?;
                reports.push(if specs.is_empty() {
                    estimate_delta(&b, *samples, cfg.seed)?
                } else {
                    estimate_delta(&build_coned_off(b, specs.clone())?, *samples, cfg.seed)?
                });
            }
            Ok(Report::ok(match f {
                Format::Csv => sweep_to_csv(&reports),
                Format::Json if reports.len() == 1 => json(&reports[0]),
                Format::Json => json(&reports),
                Format::Table => {
                    let mut out = String::from("radius  delta_thin  samples  worst\n");
                    for r in &reports {
                        let worst = r.worst.as_ref().map_or("-".to_string(), |w| w.join(" "));
                        out.push_str(&format!("{}  {}  {}  {worst}\n", r.radius, r.delta_thin, r.sample_size));
                    }
                    out
                }
                Format::Dot => return Err(unsupported(name, f)),
            }))
        }
        Command::Morse { group, radius, start, path, l, c } => {
            let p = load_group(group)?;
            let b = CayleyBall::build(&p, *radius)?;
            let path = walk(&b, start, path)?;
            let r = morse_check(&b, &path, *l, *c)?;
            let geodesic = labels(&b, &r.geodesic);
            Ok(Report::ok(match f {
                Format::Json => json(&j!({
                    "hausdorff": r.hausdorff,
                    "hausdorff_min": r.hausdorff_min,
                    "geodesics": r.geodesics,
                    "path": labels(&b, &path),
                    "geodesic": geodesic,
                })),
                Format::Table => table(&[
                    ("hausdorff", r.hausdorff.to_string()),
                    ("hausdorff_min", r.hausdorff_min.map_or("-".into(), |h| h.to_string())),
                    ("geodesics", r.geodesics.to_string()),
                    ("geodesic", geodesic.join(" ")),
                ]),
                _ => return Err(unsupported(name, f)),
            }))
        }
        Command::Divergence { group, radius, r, pairs } => {
            let p = load_group(group)?;
            let b = CayleyBall::build(&p, *radius)?;
            let rs = match r {
                Some(s) => numbers(s)?,
                None => (2..=radius / 2).collect(),
            };
            let d = divergence_profile(&b, &rs, *pairs)?;
            Ok(Report::ok(match f {
                Format::Csv => d.to_csv(),
                Format::Json => json(&d),
                Format::Table => {
                    let mut out = String::from("r  div  pairs  max\n");
                    for e in &d.entries {
                        let div = e.div.map_or("infinite".into(), |x| format!("{x:.4}"));
                        let max = e.max.map_or("-".into(), |m| m.to_string());
                        out.push_str(&format!("{}  {div}  {}  {max}\n", e.r, e.pairs));
                    }
                    out
                }
                Format::Dot => return Err(unsupported(name, f)),
            }))
        }
        Command::ConedOff { group, radius, peripheral } => {
            let p = load_group(group)?;
            let c = coned(&p, *radius, peripheral)?;
            let b = c.base();
            Ok(Report::ok(match f {
                Format::Dot => coned_to_dot(&c),
                Format::Csv => {
                    let mut out = String::from("vertex,word,dist_word,dist_coned\n");
                    for v in 0..b.len() {
                        out.push_str(&format!("{v},{},{},{}\n", b.word_string(v), b.dist0(v), c.dist_coned(v)));
                    }
                    out
                }
                Format::Json | Format::Table => {
                    let mut layers: BTreeMap<u32, usize> = BTreeMap::new();
                    for v in 0..b.len() {
                        *layers.entry(c.dist_coned(v)).or_default() += 1;
                    }
                    let edges = c.peripheral_edges().count();
                    if f == Format::Json {
                        let layers: Vec<usize> = layers.values().copied().collect();
                        json(&j!({ "radius": radius, "vertices": b.len(), "peripheral_edges": edges, "coned_layers": layers }))
                    } else {
                        let layers: Vec<String> = layers.iter().map(|(d, n)| format!("{d}:{n}")).collect();
                        table(&[
                            ("vertices", b.len().to_string()),
                            ("peripheral edges", edges.to_string()),
                            ("coned layers", layers.join(" ")),
                        ])
                    }
                }
            }))
        }
        Command::Bcp { group, radius, peripheral, lambda, per_endpoint } => {
            let p = load_group(group)?;
            let c = coned(&p, *radius, peripheral)?;
            let corpus = geodesic_corpus(&c, *per_endpoint);
            let r = bcp_test(&c, *lambda, &corpus)?;
            let pass = r.verdict == BcpVerdict::Pass;
            let text = match f {
                Format::Json => r.to_json(),
                Format::Table => {
                    let mut out = table(&[
                        ("verdict", if pass { "PASS" } else { "FAIL" }.into()),
                        ("a_estimate", r.a_estimate.map_or("unbounded".into(), |a| a.to_string())),
                        ("pairs tested", r.corpus_stats.tested.to_string()),
                        ("required_by_scale", r.required_by_scale.iter().map(|(s, a)| format!("{s}:{a}")).collect::<Vec<_>>().join(" ")),
                    ]);
                    for w in r.clause1_witnesses.iter().chain(&r.clause2_witnesses) {
                        out.push_str(&format!(
                            "witness clause {} scale {} length {} a >= {} coset {}\n  p: {}\n  q: {}\n",
                            w.clause,
                            w.scale,
                            w.length,
                            w.required_a,
                            w.coset,
                            w.p.join(" "),
                            w.q.join(" ")
                        ));
                    }
                    out
                }
                _ => return Err(unsupported(name, f)),
            };
            Ok(Report::verdict(text, pass))
        }
        Command::CosetHausdorff { group, radius, subgroup, g1, g2, rho } => {
            let p = load_group(group)?;
            let b = CayleyBall::build(&p, *radius)?;
            let s = SubgroupSpec::new(&p, words(&p, subgroup)?)?;
            let rhos = match rho {
                Some(r) => numbers(r)?,
                None => (0..=radius / 2).collect(),
            };
            let probe = coset_hausdorff_probe(&b, &s, element(&b, g1)?, element(&b, g2)?, &rhos)?;
            let show = |d: Option<u32>| d.map_or(format!(">{radius}"), |d| d.to_string());
            Ok(Report::ok(match f {
                Format::Json => json(&probe),
                Format::Csv => {
                    let mut out = String::from("rho,distance,truncated\n");
                    for e in &probe.entries {
                        out.push_str(&format!("{},{},{}\n", e.rho, show(e.distance), e.truncated));
                    }
                    out
                }
                Format::Table => {
                    let mut out = String::from("rho  distance  truncated\n");
                    for e in &probe.entries {
                        out.push_str(&format!("{}  {}  {}\n", e.rho, show(e.distance), e.truncated));
                    }
                    out.push_str(&format!("growing  {}\n", probe.growing));
                    out
                }
                Format::Dot => return Err(unsupported(name, f)),
            }))
        }
        Command::TreegradedVerify { file } => {
            let g = TreeGradedGraph::parse(&read(file)?)?;
            let r = g.verify_axioms();
            let text = match f {
                Format::Json => r.to_json(),
                Format::Table => {
                    let mut rows = vec![
                        ("pass", r.pass.to_string()),
                        ("T1 (pieces meet in at most one vertex)", r.t1.pass.to_string()),
                        ("T2'' (simple loops lie in one piece)", format!("{}{}", r.t2pp.pass, if r.t2pp.partial { " (partial)" } else { "" })),
                        ("pieces geodesic", r.pieces_geodesic.pass.to_string()),
                        ("cut points", r.cut_points.join(" ")),
                        ("piece intersections", r.piece_intersections.join(" ")),
                        ("cut-point duality", r.cut_point_duality.to_string()),
                    ];
                    if let Some((pieces, vs)) = &r.t1.witness {
                        rows.push(("T1 witness", format!("{} {} share {} {}", pieces[0], pieces[1], vs[0], vs[1])));
                    }
                    if let Some(lp) = &r.t2pp.witness {
                        rows.push(("T2'' witness", lp.join(" ")));
                    }
                    table(&rows)
                }
                _ => return Err(unsupported(name, f)),
            };
            Ok(Report::verdict(text, r.pass))
        }
        Command::Project { file, vertex, piece } => {
            let g = TreeGradedGraph::parse(&read(file)?)?;
            let y = g.project_to_piece(g.vertex_index(vertex)?, g.piece_index(piece)?)?;
            Ok(Report::ok(match f {
                Format::Json => json(&j!({ "vertex": vertex, "piece": piece, "projection": g.name(y) })),
                Format::Csv => format!("vertex,piece,projection\n{vertex},{piece},{}\n", g.name(y)),
                Format::Table => table(&[("projection", g.name(y).to_string())]),
                Format::Dot => return Err(unsupported(name, f)),
            }))
        }
        Command::Transversal { file, vertex } => {
            let g = TreeGradedGraph::parse(&read(file)?)?;
            let t: Vec<&str> = g.transversal_tree_of(g.vertex_index(vertex)?)?.into_iter().map(|v| g.name(v)).collect();
            Ok(Report::ok(match f {
                Format::Json => json(&j!({ "vertex": vertex, "tree": t })),
                Format::Table => table(&[("transversal tree", t.join(" "))]),
                _ => return Err(unsupported(name, f)),
            }))
        }
        Command::ChordDivide { group, radius, start, lp, parts } => {
            let p = load_group(group)?;
            let b = CayleyBall::build(&p, *radius)?;
            let lp = walk(&b, start, lp)?;
            let d = chord_division(&b, &lp, *parts)?;
            let loops: Vec<Vec<String>> = d.loops.iter().map(|l| labels(&b, l)).collect();
            Ok(Report::ok(match f {
                Format::Json => json(&j!({ "length": d.length, "parts": d.parts, "max_length": d.max_length, "halved": d.halved, "loops": loops })),
                Format::Table => {
                    let mut out = table(&[
                        ("length", d.length.to_string()),
                        ("parts", d.parts.to_string()),
                        ("max length", d.max_length.to_string()),
                        ("halved", d.halved.to_string()),
                    ]);
                    for l in &loops {
                        out.push_str(&format!("loop {}: {}\n", l.len() - 1, l.join(" ")));
                    }
                    out
                }
                _ => return Err(unsupported(name, f)),
            }))
        }
        Command::Folner { group, radius, k, epsilon, size_cap, exhaustive, bound } => {
            let p = load_group(group)?;
            let b = CayleyBall::build(&p, *radius)?;
            let kw = match k {
                Some(text) => words(&p, text)?,
                None => p.alphabet().letters().map(Word::letter).collect(),
            };
            let kv: Vec<usize> = kw.iter().map(|w| Ok(b.vertex(&p.normal_form(w)?)?)).collect::<CliResult<_>>()?;
            let opts = FolnerOptions {
                epsilon: *epsilon,
                size_cap: *size_cap,
                structured: !exhaustive,
                bound: *bound,
            };
            let out = folner_search(&b, &kv, opts)?;
            let found = matches!(out, FolnerOutcome::Found(_));
            let text = match (f, &out) {
                (Format::Json, _) => json(&out),
                (Format::Table, FolnerOutcome::Found(s)) => table(&[
                    ("result", "found".into()),
                    ("method", s.method.into()),
                    ("|F|", s.size.to_string()),
                    ("|KF|", s.kf.to_string()),
                    ("within bound", s.within_bound.map_or("-".into(), |w| w.to_string())),
                    ("F", s.words.join(" ")),
                ]),
                (Format::Table, FolnerOutcome::NotFound { size_cap, candidates, pruned, min_ratio }) => table(&[
                    ("result", "not found".into()),
                    ("size cap", size_cap.to_string()),
                    ("candidates", candidates.to_string()),
                    ("pruned", pruned.to_string()),
                    ("min |KF|/|F|", format!("{min_ratio:.4}")),
                ]),
                _ => return Err(unsupported(name, f)),
            };
            Ok(Report::verdict(text, found))
        }
        Command::Pingpong { group, radius, g, h, depth, sets } => {
            let p = load_group(group)?;
            let b = CayleyBall::build(&p, *radius)?;
            let (g, h) = (p.normal_form(&p.parse_word(g)?)?, p.normal_form(&p.parse_word(h)?)?);
            let [gp, gm, hp, hm] = attracting_sets(&b, &g, &h, *sets)?;
            let sizes = [gp.len(), gm.len(), hp.len(), hm.len()];
            let cert = PingPongCertificate {
                g,
                h,
                g_plus: gp,
                g_minus: gm,
                h_plus: hp,
                h_minus: hm,
                depth: *depth,
            };
            let v = verify_ping_pong(&cert, &b)?;
            let text = match f {
                Format::Json => json(&j!({ "sets": sizes, "result": v })),
                Format::Table => table(&[
                    ("verdict", if v.is_certified() { "certified".into() } else { "failed".to_string() }),
                    ("set sizes", format!("{sizes:?}")),
                    ("detail", serde_json::to_string(&v).unwrap()),
                ]),
                _ => return Err(unsupported(name, f)),
            };
            Ok(Report::verdict(text, v.is_certified()))
        }
    }
}

fn coned(p: &Presentation, radius: usize, given: &[String]) -> CliResult<ConedOffBall> {
    let specs = peripherals(p, given)?;
    if specs.is_empty() {
        return Err(CliError::Usage("at least one --peripheral (or a peripheral line in the presentation) is required".into()));
    }
    Ok(build_coned_off(CayleyBall::build(p, radius)?, specs)?)
}

fn attracting_sets(b: &CayleyBall, g: &Word, h: &Word, rule: SetRule) -> CliResult<[Vec<usize>; 4]> {
    let mut out: [Vec<usize>; 4] = Default::default();
    match rule {
        SetRule::Prefix => {
            let first = |w: &Word| -> CliResult<Letter> {
                w.letters().first().copied().ok_or_else(|| CliError::Usage("ping-pong elements must be non-trivial".into()))
            };
            let keys = [first(g)?, first(&g.inverse())?, first(h)?, first(&h.inverse())?];
            for i in 0..4 {
                if keys[..i].contains(&keys[i]) {
                    return Err(CliError::Usage("--sets prefix needs g, g⁻¹, h, h⁻¹ to start with four different letters".into()));
                }
            }
            for v in 1..b.len() {
                let l = b.word(v).letters()[0];
                if let Some(slot) = keys.iter().position(|&k| k == l) {
                    out[slot].push(v);
                }
            }
        }
        SetRule::Cones => {
            let n = b.presentation().generator_count();
            let (eg, eh) = (exponent_sums(n, g), exponent_sums(n, h));
            let dot = |a: &[i64], b: &[i64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<i64>();
            for v in 1..b.len() {
                let e = exponent_sums(n, b.word(v));
                let (a, c) = (dot(&e, &eg), dot(&e, &eh));
                let slot = if a > c.abs() {
                    0
                } else if -a > c.abs() {
                    1
                } else if c > a.abs() {
                    2
                } else if -c > a.abs() {
                    3
                } else {
                    continue;
                };
                out[slot].push(v);
            }
        }
    }
    Ok(out)
}
