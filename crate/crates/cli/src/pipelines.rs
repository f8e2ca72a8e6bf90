//! One function per subcommand; each fills a [`RunReport`].

use dilatelab::dilation_build::{
    build_pure_dilation, build_schaffer, verify_intertwining, verify_isometric_dilation, DilationCheck,
    DEFAULT_TRIALS,
};
use dilatelab::dilation_data::{
    classify, extract_candidates, gen_compressed_tuple, gen_diagonal_model_data, overall_pass, verify,
    verify_coromain, verify_main, verify_pure, ConditionReport, Conditions, DilationData, Space,
};
use dilatelab::fixtures::{Fixture, Source};
use dilatelab::linalg::{op_norm, Tolerance};
use dilatelab::models::{auto_truncation, delta_grid, verify_model, DEFAULT_GRID_SIZE};
use dilatelab::tuples::{c0_diagnostic, ContractionTuple};

use crate::document::{Candidates, TupleDocument};
use crate::report::{ReportError, RunReport};

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub atol: Option<f64>,
    pub seed: u64,
}

impl Options {
    pub fn tolerance(&self, doc: &TupleDocument) -> Result<Tolerance, ReportError> {
        match self.atol.or(doc.tolerance) {
            Some(a) => Ok(Tolerance::new(a)?),
            None => Ok(Tolerance::default()),
        }
    }
}

type Step = Result<(), ReportError>;

fn informational(reports: Vec<ConditionReport>) -> Vec<ConditionReport> {
    reports.into_iter().map(ConditionReport::informational).collect()
}

/// Supplied candidates when they live on `space`, else extracted ones.
fn data_for(
    doc: &TupleDocument,
    t: &ContractionTuple,
    space: Space,
    tol: Tolerance,
    report: &mut RunReport,
) -> Result<DilationData, ReportError> {
    let (d, source) = match doc.stated_data(t, space, tol) {
        Some(d) => (d?, "stated"),
        None => (extract_candidates(t, space, tol)?, "extracted"),
    };
    report.classify("data_source", source);
    Ok(d)
}

pub fn validate(doc: &TupleDocument, _opts: &Options, tol: Tolerance, report: &mut RunReport) -> Step {
    let ms = &doc.matrices;
    let mut reports = Vec::new();
    for (i, m) in ms.iter().enumerate() {
        let excess = (op_norm(m) - 1.0).max(0.0);
        reports.push(ConditionReport::scalar("contractive", vec![i], excess, tol));
    }
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            let c = &(&ms[i] * &ms[j]) - &(&ms[j] * &ms[i]);
            reports.push(ConditionReport::scalar("commuting", vec![i, j], op_norm(&c), tol));
        }
    }
    report.classify("n", doc.n);
    report.classify("dim", doc.dim);
    report.add_stage("validate", reports);
    Ok(())
}

fn default_conditions(space: Space) -> Conditions {
    match space {
        Space::DefectOfT => Conditions::Main,
        Space::DefectOfTAdjoint => Conditions::Pure,
    }
}

pub fn extract(doc: &TupleDocument, space: Space, tol: Tolerance, report: &mut RunReport) -> Step {
    let t = doc.tuple(tol)?;
    let d = extract_candidates(&t, space, tol)?;
    let conditions = default_conditions(space);
    report.add_stage(conditions.label(), verify(&t, &d, conditions, tol)?);
    report.classify("space", space.label());
    report.classify("rank", d.rank());
    report.artifact("dilation_data", &d);
    Ok(())
}

pub fn verify_doc(
    doc: &TupleDocument,
    space: Option<Space>,
    conditions: Option<Conditions>,
    tol: Tolerance,
    report: &mut RunReport,
) -> Step {
    let t = doc.tuple(tol)?;
    let conditions = conditions
        .or(doc.default_conditions())
        .or(space.map(default_conditions))
        .unwrap_or(Conditions::Main);
    let space = space.unwrap_or(conditions.space());
    let d = data_for(doc, &t, space, tol, report)?;
    report.add_stage(conditions.label(), verify(&t, &d, conditions, tol)?);
    report.classify("conditions", conditions.label());
    report.classify("space", space.label());
    report.artifact("dilation_data", &d);
    Ok(())
}

pub fn dilate(doc: &TupleDocument, degree: usize, opts: &Options, tol: Tolerance, report: &mut RunReport) -> Step {
    let t = doc.tuple(tol)?;
    let d = data_for(doc, &t, Space::DefectOfT, tol, report)?;
    let minimal = overall_pass(&verify_main(&t, &d, tol)?);
    let coromain = verify_coromain(&t, &d, tol)?;
    let dilates = overall_pass(&coromain);
    report.classify("minimal_product", minimal);
    report.add_stage("coromain", coromain);
    if dilates {
        let dil = build_schaffer(&t, &d, tol)?;
        let check = DilationCheck {
            max_degree: degree,
            trials: DEFAULT_TRIALS,
            seed: opts.seed,
            check_product: minimal,
        };
        report.add_stage("schaffer", verify_isometric_dilation(&t, &dil, check, tol)?.reports);
    }

    let c0 = c0_diagnostic(t.product(), 1, tol)?;
    report.classify("c0", c0.is_c0);
    if c0.is_c0 {
        let pd = extract_candidates(&t, Space::DefectOfTAdjoint, tol)?;
        let pure = overall_pass(&verify_pure(&t, &pd, tol)?);
        report.classify("pure", pure);
        if pure {
            let (n, _) = auto_truncation(t.product())?;
            let ms = build_pure_dilation(&t, &pd, tol)?;
            let r = verify_intertwining(&t, &pd, &ms, n, DEFAULT_TRIALS, opts.seed, tol)?;
            report.classify("truncation", n);
            report.add_stage("intertwining", r.reports);
        }
    }
    Ok(())
}

pub fn model(doc: &TupleDocument, trunc: Option<usize>, opts: &Options, tol: Tolerance, report: &mut RunReport) -> Step {
    let t = doc.tuple(tol)?;
    let x = t.product();
    let c0 = c0_diagnostic(x, 1, tol)?;
    if !c0.is_c0 {
        return Err(dilatelab::Error::NotC0 {
            spectral_radius: c0.spectral_radius,
        }
        .into());
    }
    let (n, tail) = match trunc {
        Some(n) => (n, op_norm(&x.adjoint().pow(n))),
        None => auto_truncation(x)?,
    };
    report.classify("truncation", n);
    report.classify("tail_bound", tail);
    let grid = delta_grid(x, DEFAULT_GRID_SIZE, tol)?;
    report.classify("delta_max_rank", grid.max_rank);

    let d = extract_candidates(&t, Space::DefectOfTAdjoint, tol)?;
    let pure = verify_pure(&t, &d, tol)?;
    let passes = overall_pass(&pure);
    report.add_stage("pure", pure);
    if passes {
        let r = verify_model(&t, &d, n, tol)?;
        report.add_stage("model", r.reports);
        let ms = build_pure_dilation(&t, &d, tol)?;
        let r = verify_intertwining(&t, &d, &ms, n, DEFAULT_TRIALS, opts.seed, tol)?;
        report.add_stage("intertwining", r.reports);
    }
    Ok(())
}

/// Classifies the tuple; the verdict is whether the document's expected
/// outcomes are met, and every underlying check is reported as
/// informational.
pub fn classify_doc(doc: &TupleDocument, tol: Tolerance, report: &mut RunReport) -> Step {
    let t = doc.tuple(tol)?;
    let c = classify(&t, tol)?;
    report.classify("in_S_n", c.in_s_n);
    report.classify("in_U_n", c.in_u_n);
    report.classify("u_membership", c.u_membership);
    report.classify("c0", c.c0.is_c0);
    if let Some(p) = &c.pure {
        report.classify("pure", p.passes);
    }
    if let Some(s) = &c.szego {
        report.classify("szego", s.passes);
        report.classify("szego_min_eig", s.min_eig);
    }
    if let Some(s) = &c.szego_first_order {
        report.classify("szego_first_order", s.passes);
        report.classify("szego_first_order_min_eig", s.min_eig);
    }
    if let Some(b) = &c.brehmer {
        report.classify("brehmer", b.passes);
    }

    let mut scratch = RunReport::new("", "", 0);
    verify_doc(doc, None, None, tol, &mut scratch)?;
    report.classify("pass", overall_pass(&scratch.condition_reports));

    report.add_stage("main", informational(c.main_reports));
    report.add_stage("coromain", informational(c.coromain_reports));
    if let Some(comp) = c.completion {
        report.add_stage("completion", informational(comp.reports));
    }
    if let Some(p) = c.pure {
        report.add_stage("pure", informational(p.reports));
    }
    let expectations = doc
        .expected
        .iter()
        .map(|(k, want)| {
            let got = report.classifications.get(k).and_then(|v| v.as_bool());
            let residual = if got == Some(*want) { 0.0 } else { 1.0 };
            ConditionReport::scalar(format!("expected:{k}"), vec![], residual, tol)
        })
        .collect();
    report.add_stage("expectations", expectations);
    Ok(())
}

/// The document reproducing a fixture, carrying its expected outcomes.
pub fn fixture_document(fx: &Fixture) -> TupleDocument {
    let mut doc = TupleDocument::new(fx.id, fx.matrices.clone());
    doc.tolerance = Some(fx.tol.atol());
    doc.conditions = Some(fx.conditions.label().to_string());
    doc.expected = fx.expected.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    doc.expected.insert("pass".into(), fx.expected_pass);
    if fx.source == Source::Stated {
        let s = fx.stated.clone().expect("stated fixtures carry data");
        doc.candidates = Some(Candidates { u: s.u, p: s.p });
    }
    doc
}

/// Runs the fixture's own pipeline and attaches its classification.
pub fn demo(fx: &Fixture, tol: Tolerance, report: &mut RunReport) -> Step {
    let doc = fixture_document(fx);
    report.artifact("summary", fx.summary);
    verify_doc(&doc, None, None, tol, report)?;
    let mut cls = RunReport::new(fx.id, "classify", report.seed);
    classify_doc(&doc, tol, &mut cls)?;
    let met = overall_pass(&cls.condition_reports);
    for (k, v) in cls.classifications {
        report.classifications.entry(k).or_insert(v);
    }
    report.classify("expectations_met", met);
    report.classify("expected_verdict", if fx.expected_pass { "pass" } else { "fail" });
    Ok(())
}

pub fn generate(rank: usize, n: usize, degree: usize, seed: u64, tol: Tolerance) -> Result<TupleDocument, ReportError> {
    let data = gen_diagonal_model_data(rank, n, seed)?;
    let t = gen_compressed_tuple(&data, degree, tol)?;
    let mut doc = TupleDocument::new(format!("gen-r{rank}-n{n}-m{degree}-s{seed}"), t.ops().to_vec());
    doc.conditions = Some(Conditions::Pure.label().to_string());
    doc.expected.insert("pass".into(), true);
    doc.expected.insert("pure".into(), true);
    Ok(doc)
}
