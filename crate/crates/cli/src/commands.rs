use std::fmt::Write;

use groupoid_lab::automaton::GraphAutomaton;
use groupoid_lab::groupoid::reduce;
use groupoid_lab::labeling::count_axis_paths;
use groupoid_lab::moments::{self, WordSetMode};
use groupoid_lab::ncpartitions::{
    catalan, enumerate_nc_limited, moebius_bottom_top, nc_with_moebius, DEFAULT_NC_LIMIT,
};
use groupoid_lab::operators::{self, build_basis, labeling_operator, reduced_word_counts, vertex_diagonal};
use groupoid_lab::{DiagonalElement, EdgeWord, Error as LibError, LabeledGraph};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::input;
use crate::report::{diagonal_inline, diagonal_json, Report};
use crate::{Cli, Command, FormulaArg, GraphArgs, ModeArg, WordSetArg};

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::Moments { .. } => "moments",
        Command::Oracle { .. } => "oracle",
        Command::Cumulants { .. } => "cumulants",
        Command::Joint { .. } => "joint",
        Command::Freeness { .. } => "freeness",
        Command::Fractaloid { .. } => "fractaloid",
        Command::Tree { .. } => "tree",
        Command::Lattice { .. } => "lattice",
        Command::Nc { .. } => "nc",
        Command::Words { .. } => "words",
    }
}

pub fn dispatch(cli: &Cli, r: &mut Report) -> Result<(), CliError> {
    match &cli.command {
        Command::Moments { graph, n, mode, verify } => moments(cli, graph, *n, *mode, *verify, r),
        Command::Oracle { graph, n, max_len } => oracle(cli, graph, *n, *max_len, r),
        Command::Cumulants { graph, n, formula } => cumulants(cli, graph, *n, *formula, r),
        Command::Joint { graph, indices, cumulant, verify } => joint(cli, graph, indices, *cumulant, *verify, r),
        Command::Freeness { graph, families, max_n } => freeness(graph, families, *max_n, r),
        Command::Fractaloid { graph, depth } => fractaloid(graph, *depth, r),
        Command::Tree { graph, depth, root } => tree(graph, *depth, root.as_deref(), r),
        Command::Lattice { max_label, length } => lattice(*max_label, *length, r),
        Command::Nc { n } => nc(*n, r),
        Command::Words { graph, n, set } => words(cli, graph, *n, *set, r),
    }
}

fn load(ga: &GraphArgs, r: &mut Report) -> Result<LabeledGraph, CliError> {
    let lg = input::load(&ga.graph, ga.labeling)?;
    r.graph_inputs(&ga.graph, &lg);
    Ok(lg)
}

fn positive(what: &str, n: usize) -> Result<(), CliError> {
    if n == 0 {
        Err(CliError::Invalid(format!("--{what} must be at least 1")))
    } else {
        Ok(())
    }
}

fn mode_of(m: ModeArg) -> WordSetMode {
    match m {
        ModeArg::Reduction => WordSetMode::Reduction,
        ModeArg::Balance => WordSetMode::Balance,
    }
}

fn render_word(lg: &LabeledGraph, w: &EdgeWord) -> String {
    format!("({})", w.render(lg.graph()).join(", "))
}

fn mismatch(
    r: &mut Report,
    what: &str,
    got: &DiagonalElement,
    oracle: &DiagonalElement,
    lg: &LabeledGraph,
) -> CliError {
    let g = lg.graph();
    let message = format!(
        "{what} disagrees with the operator oracle: {} vs {}",
        diagonal_inline(got, g),
        diagonal_inline(oracle, g)
    );
    r.note(message.clone());
    CliError::Mismatch { message, report: Box::new(r.clone()) }
}

fn moments(cli: &Cli, ga: &GraphArgs, n: usize, mode: ModeArg, verify: bool, r: &mut Report) -> Result<(), CliError> {
    let lg = load(ga, r)?;
    let g = lg.graph();
    let mode = mode_of(mode);
    r.input("n", n).input("mode", mode.name());
    positive("n", n)?;
    if verify && mode != WordSetMode::Reduction {
        return Err(CliError::Invalid("--verify checks the reduction mode against the oracle".into()));
    }
    let value = match mode {
        WordSetMode::Reduction => moments::moment(&lg, n, cli.max_words)?,
        WordSetMode::Balance => moments::balance_count(&lg, n, cli.max_words)?,
    };
    r.diagonal(&value, g);

    let loops: Vec<&str> = g.edge_indices().filter(|&e| g.is_loop_edge(e)).map(|e| g.edge_id(e)).collect();
    if mode == WordSetMode::Reduction && n.is_multiple_of(2) && !loops.is_empty() {
        r.note(format!(
            "loop edges present ({}): for each loop edge l the words (l, ~l) and (~l, l) reduce to a vertex and are counted",
            loops.join(", ")
        ));
    }

    // reduction and balance sets, side by side
    let other_mode = match mode {
        WordSetMode::Reduction => WordSetMode::Balance,
        WordSetMode::Balance => WordSetMode::Reduction,
    };
    let other = match other_mode {
        WordSetMode::Reduction => moments::moment(&lg, n, cli.max_words)?,
        WordSetMode::Balance => moments::balance_count(&lg, n, cli.max_words)?,
    };
    if other != value {
        let bal = moments::w_m_set(&lg, n, WordSetMode::Balance, cli.max_words)?;
        let witness = bal.words.iter().find(|w| !reduce(g, w).is_vertex());
        let (red, balc) = match mode {
            WordSetMode::Reduction => (&value, &other),
            WordSetMode::Balance => (&other, &value),
        };
        let mut s = format!(
            "reduction mode gives {}, balance mode gives {}",
            diagonal_inline(red, g),
            diagonal_inline(balc, g)
        );
        if let Some(w) = witness {
            let _ = write!(s, "; the balanced loop word {} does not reduce to a vertex", render_word(&lg, w));
        }
        r.note(s);
    }

    if verify {
        let oracle = operators::oracle_expectation_power(&lg, n, n, cli.max_basis as usize)?;
        if oracle != value {
            return Err(mismatch(r, "moment", &value, &oracle, &lg));
        }
        r.note(format!("verified against the operator oracle at truncation length {n}"));
    }
    Ok(())
}

fn oracle(cli: &Cli, ga: &GraphArgs, n: usize, max_len: Option<usize>, r: &mut Report) -> Result<(), CliError> {
    let lg = load(ga, r)?;
    let l = max_len.unwrap_or(n);
    let size: u128 = reduced_word_counts(lg.graph(), l).iter().sum();
    r.input("n", n).input("max_len", l).input("basis_size", size.to_string());
    let value = operators::oracle_expectation_power(&lg, n, l, cli.max_basis as usize)?;
    r.diagonal(&value, lg.graph());
    Ok(())
}

fn cumulants(cli: &Cli, ga: &GraphArgs, n: usize, formula: FormulaArg, r: &mut Report) -> Result<(), CliError> {
    let lg = load(ga, r)?;
    let g = lg.graph();
    let fname = match formula {
        FormulaArg::Direct => "direct",
        FormulaArg::Wc => "wc",
        FormulaArg::Both => "both",
    };
    r.input("n", n).input("formula", fname);
    positive("n", n)?;
    if n > DEFAULT_NC_LIMIT {
        return Err(LibError::BudgetExceeded { what: "partition size", limit: DEFAULT_NC_LIMIT as u64 }.into());
    }
    if formula == FormulaArg::Direct {
        let k = moments::cumulant_direct(&lg, n)?;
        r.diagonal(&k, g);
        return Ok(());
    }
    let rep = moments::cumulant_via_wc(&lg, n, cli.max_words)?;
    let agree = if rep.single_edge_agrees() {
        "agrees with".to_string()
    } else {
        format!("differs from (difference {})", diagonal_inline(&rep.single_edge_diff(), g))
    };
    r.note(format!("single-edge word sum over {} words {agree} the direct cumulant", rep.single_edge_words));
    r.note(format!(
        "sum of mu_w over all {} vertex-reducing words {} the direct cumulant",
        rep.all_words_count,
        if rep.all_words_agree() { "equals" } else { "differs from" }
    ));
    if formula == FormulaArg::Wc {
        r.diagonal(&rep.single_edge, g);
    } else {
        r.result = json!({
            "direct": diagonal_json(&rep.direct, g),
            "single_edge": diagonal_json(&rep.single_edge, g),
            "all_words": diagonal_json(&rep.all_words, g),
            "single_edge_agrees": rep.single_edge_agrees(),
            "all_words_agree": rep.all_words_agree(),
        });
        let mut t = String::new();
        for (label, d) in
            [("direct", &rep.direct), ("single-edge words", &rep.single_edge), ("all words", &rep.all_words)]
        {
            let _ = writeln!(t, "{label:<18} {}", diagonal_inline(d, g));
        }
        r.text = t;
    }
    Ok(())
}

fn joint(
    cli: &Cli,
    ga: &GraphArgs,
    indices: &[i32],
    cumulant: bool,
    verify: bool,
    r: &mut Report,
) -> Result<(), CliError> {
    let lg = load(ga, r)?;
    let g = lg.graph();
    r.input("indices", indices).input("quantity", if cumulant { "cumulant" } else { "moment" });
    if verify && cumulant {
        return Err(CliError::Invalid("--verify applies to joint moments".into()));
    }
    let value = if cumulant {
        if indices.len() > DEFAULT_NC_LIMIT {
            return Err(LibError::BudgetExceeded { what: "partition size", limit: DEFAULT_NC_LIMIT as u64 }.into());
        }
        moments::joint_cumulant(&lg, indices)?
    } else {
        moments::joint_moment(&lg, indices, cli.max_words)?
    };
    r.diagonal(&value, g);
    if verify {
        let basis = build_basis(g, indices.len(), cli.max_basis as usize)?;
        let mut m = labeling_operator(&lg, indices[0], &basis)?;
        for &k in &indices[1..] {
            m = m.mul(&labeling_operator(&lg, k, &basis)?);
        }
        let oracle = vertex_diagonal(&m, &basis, g);
        if oracle != value {
            return Err(mismatch(r, "joint moment", &value, &oracle, &lg));
        }
        r.note(format!("verified against the operator oracle at truncation length {}", indices.len()));
    }
    Ok(())
}

fn freeness(ga: &GraphArgs, families: &[i32], max_n: usize, r: &mut Report) -> Result<(), CliError> {
    let lg = load(ga, r)?;
    let g = lg.graph();
    r.input("families", families).input("max_n", max_n);
    let &[k1, k2] = families else {
        return Err(CliError::Invalid("--families takes exactly two labels, e.g. 1,2".into()));
    };
    if max_n > DEFAULT_NC_LIMIT {
        return Err(LibError::BudgetExceeded { what: "partition size", limit: DEFAULT_NC_LIMIT as u64 }.into());
    }
    let rep = moments::check_freeness(&lg, k1, k2, max_n)?;
    let witness = rep.witness.as_ref().map(|(t, d)| json!({"indices": t, "value": diagonal_json(d, g)}));
    r.result = json!({
        "free_to_order": rep.free_to_order(),
        "checked": rep.checked,
        "nonzero": rep.nonzero,
        "max_abs": rep.max_abs.to_string(),
        "diagram_distinct": rep.diagram_distinct,
        "witness": witness,
    });
    let mut t = format!(
        "mixed cumulants checked: {}\nnonzero: {}\nmax |coefficient|: {}\nfamilies diagram-distinct: {}\n",
        rep.checked, rep.nonzero, rep.max_abs, rep.diagram_distinct
    );
    if let Some((idx, d)) = &rep.witness {
        let _ = writeln!(t, "first nonzero: k({idx:?}) = {}", diagonal_inline(d, g));
    }
    r.text = t;
    if !rep.diagram_distinct {
        r.note("some edge of one family shares its diagram with an edge of the other, so the sufficient condition for freeness does not apply");
    }
    Ok(())
}

fn fractaloid(ga: &GraphArgs, depth: usize, r: &mut Report) -> Result<(), CliError> {
    let lg = load(ga, r)?;
    let g = lg.graph();
    r.input("depth", depth);
    let aut = GraphAutomaton::new(&lg);
    let v = aut.is_fractaloid(depth)?;
    let mut levels = serde_json::Map::new();
    for root in g.vertex_indices() {
        levels.insert(g.vertex_id(root).to_string(), json!(aut.build_tree(root, depth)?.level_sizes()));
    }
    let witness = v.witness.as_ref().map(|w| {
        json!({
            "root": w.root,
            "path": w.path,
            "vertex": w.vertex,
            "children": w.children,
            "child_labels": w.child_labels,
        })
    });
    r.result = json!({
        "fractaloid": v.fractaloid,
        "depth": v.depth,
        "branching": v.branching,
        "local_criterion": v.local_criterion,
        "witness": witness,
        "levels": Value::Object(levels),
    });
    let mut t = format!("fractaloid: {} (depth {}, branching {})\n", v.fractaloid, v.depth, v.branching);
    if let Some(w) = &v.witness {
        let _ = writeln!(
            t,
            "witness: root {}, path ({}), vertex {} has {} children with labels {:?}",
            w.root,
            w.path.join(", "),
            w.vertex,
            w.children,
            w.child_labels
        );
    }
    r.text = t;
    if v.local_criterion != v.fractaloid {
        r.note(format!(
            "per-vertex label criterion says {}, the depth-{} tree check says {}",
            v.local_criterion, v.depth, v.fractaloid
        ));
    }
    Ok(())
}

fn tree(ga: &GraphArgs, depth: usize, root: Option<&str>, r: &mut Report) -> Result<(), CliError> {
    let lg = load(ga, r)?;
    let g = lg.graph();
    let root = match root {
        Some(id) => g.vertex(id)?,
        None => g.vertex_indices().next().expect("graphs have a vertex"),
    };
    r.input("depth", depth).input("root", g.vertex_id(root));
    let t = GraphAutomaton::new(&lg).build_tree(root, depth)?;
    let dot = t.to_dot(&lg);
    r.result = json!({"nodes": t.len(), "levels": t.level_sizes(), "dot": dot});
    r.text = dot;
    Ok(())
}

fn lattice(max_label: u32, length: u32, r: &mut Report) -> Result<(), CliError> {
    r.input("max_label", max_label).input("length", length);
    if max_label == 0 {
        return Err(CliError::Invalid("--max-label must be at least 1".into()));
    }
    let c = count_axis_paths(max_label, length);
    r.result = json!(c.to_string());
    r.text = format!("{c}\n");
    Ok(())
}

fn nc(n: usize, r: &mut Report) -> Result<(), CliError> {
    r.input("n", n);
    positive("n", n)?;
    enumerate_nc_limited(n, DEFAULT_NC_LIMIT)?;
    let row = nc_with_moebius(n)?;
    let m = moebius_bottom_top(n);
    let sum: BigInt = row.iter().map(|(_, mu)| mu).sum();
    let parts: Vec<Value> =
        row.iter().map(|(p, mu)| json!({"partition": p.to_string(), "moebius": mu.to_string()})).collect();
    r.result = json!({
        "count": row.len(),
        "catalan": catalan(n as u32).to_string(),
        "moebius_bottom_top": m[n].to_string(),
        "moebius_sum": sum.to_string(),
        "partitions": parts,
    });
    let mut t = format!("|NC({n})| = {}\nmu(0, 1) = {}\nsum of mu(pi, 1) = {sum}\n", row.len(), m[n]);
    for (p, mu) in row.iter() {
        let _ = writeln!(t, "{p}  {mu}");
    }
    r.text = t;
    Ok(())
}

fn words(cli: &Cli, ga: &GraphArgs, n: usize, set: WordSetArg, r: &mut Report) -> Result<(), CliError> {
    let lg = load(ga, r)?;
    let g = lg.graph();
    let sname = match set {
        WordSetArg::Moment => "moment",
        WordSetArg::Balance => "balance",
        WordSetArg::Cumulant => "cumulant",
    };
    r.input("n", n).input("set", sname);
    positive("n", n)?;
    let list = match set {
        WordSetArg::Moment => moments::w_m_set(&lg, n, WordSetMode::Reduction, cli.max_words)?.words,
        WordSetArg::Balance => moments::w_m_set(&lg, n, WordSetMode::Balance, cli.max_words)?.words,
        WordSetArg::Cumulant => {
            let need = (g.num_edges() as u128).saturating_mul(1u128.checked_shl(n as u32).unwrap_or(u128::MAX));
            if n >= 64 || need > cli.max_words as u128 {
                return Err(LibError::BudgetExceeded { what: "enumerated words", limit: cli.max_words }.into());
            }
            moments::single_edge_cumulant_words(g, n)
        }
    };
    let rendered: Vec<Vec<String>> = list.iter().map(|w| w.render(g)).collect();
    r.result = json!(rendered);
    let mut t = String::new();
    for w in &rendered {
        let _ = writeln!(t, "{}", w.join(" "));
    }
    r.text = t;
    r.note(format!("{} words", rendered.len()));
    Ok(())
}
