//! Test helpers: an HTTP client over the router and a verdict oracle that
//! does not use the library's decision tables.
#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use qcsample_core::plan::{Curtailment, Plan, SequentialPlan};
use qcsample_core::{DefectHypothesis, PlanDocument, PopulationModel, Verdict};
use qcsample_session::{router, ServiceConfig, SessionService};
use serde_json::Value;
use tower::ServiceExt;

pub struct Client {
    pub service: Arc<SessionService>,
    app: axum::Router,
}

impl Client {
    pub async fn open(dir: &std::path::Path) -> Client {
        let service = Arc::new(SessionService::open(ServiceConfig::new(dir)).await.unwrap());
        let app = router(service.clone());
        Client { service, app }
    }

    pub async fn call(&self, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let mut req = Request::builder().method(method).uri(uri);
        let body = match body {
            Some(v) => {
                req = req.header("content-type", "application/json");
                Body::from(serde_json::to_vec(&v).unwrap())
            }
            None => Body::empty(),
        };
        let resp = self.app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
        (status, value)
    }

    pub async fn create(&self, body: Value) -> Value {
        let (status, v) = self.call("POST", "/sessions", Some(body)).await;
        assert_eq!(status, StatusCode::CREATED, "{v}");
        v
    }

    pub async fn post_outcome(&self, id: &str, is_defect: bool) -> (StatusCode, Value) {
        self.call("POST", &format!("/sessions/{id}/outcomes"), Some(serde_json::json!({ "is_defect": is_defect })))
            .await
    }
}

pub fn verdict_of(v: &Value) -> Verdict {
    serde_json::from_value(v["verdict"].clone()).unwrap()
}

/// Verdict and items consumed for an outcome stream, by direct application
/// of the plan's stopping rules.
pub fn oracle(doc: &PlanDocument, outcomes: &[bool]) -> (Verdict, u64) {
    match doc.plan {
        Plan::Single(p) => {
            if (outcomes.len() as u64) < p.n {
                return (Verdict::Continue, outcomes.len() as u64);
            }
            let d = outcomes[..p.n as usize].iter().filter(|&&x| x).count() as u64;
            (if d <= p.c { Verdict::Accept } else { Verdict::Reject }, p.n)
        }
        Plan::Double(p) => {
            let mut d = 0;
            for (i, &x) in outcomes.iter().enumerate() {
                let m = i as u64 + 1;
                d += u64::from(x);
                if m == p.n1 {
                    if d <= p.c1 {
                        return (Verdict::Accept, m);
                    }
                    if d > p.c2 {
                        return (Verdict::Reject, m);
                    }
                } else if m > p.n1 && p.curtailed && d > p.c2 {
                    return (Verdict::Reject, m);
                }
                if m == p.n1 + p.n2 {
                    return (if d <= p.c2 { Verdict::Accept } else { Verdict::Reject }, m);
                }
            }
            (Verdict::Continue, outcomes.len() as u64)
        }
        Plan::Sequential(s) => {
            assert_ne!(s.curtailment, Curtailment::Wedge, "the oracle covers the plain test only");
            let mut d = 0;
            for (i, &x) in outcomes.iter().enumerate() {
                let m = i as u64 + 1;
                d += u64::from(x);
                let l = llr(&s, m, d);
                if l >= s.log_a {
                    return (Verdict::Reject, m);
                }
                if l <= s.log_b {
                    return (Verdict::Accept, m);
                }
                if m == s.truncation.at {
                    let v = if d <= s.truncation.accept_if_defects_leq { Verdict::Accept } else { Verdict::Reject };
                    return (v, m);
                }
            }
            (Verdict::Continue, outcomes.len() as u64)
        }
    }
}

/// Log-likelihood ratio summed term by term.
fn llr(s: &SequentialPlan, m: u64, d: u64) -> f64 {
    match (s.model, s.hypotheses.accept, s.hypotheses.reject) {
        (PopulationModel::WithoutReplacement { lot_size: n }, DefectHypothesis::Count(da), DefectHypothesis::Count(dr)) => {
            if d > da {
                return f64::INFINITY;
            }
            if m - d > n - dr {
                return f64::NEG_INFINITY;
            }
            let bad: f64 = (0..d).map(|j| ((dr - j) as f64 / (da - j) as f64).ln()).sum();
            let good: f64 = (0..m - d).map(|j| ((n - dr - j) as f64 / (n - da - j) as f64).ln()).sum();
            bad + good
        }
        (_, DefectHypothesis::Rate(pa), DefectHypothesis::Rate(pr)) => {
            d as f64 * (pr / pa).ln() + (m - d) as f64 * ((1.0 - pr) / (1.0 - pa)).ln()
        }
        _ => unreachable!("hypotheses match the model"),
    }
}

/// Plans with lots of at most 200 items exercised by the equivalence runs.
pub fn equivalence_plans() -> Vec<Value> {
    let mut out = Vec::new();
    for preset in ["strict", "relaxed"] {
        for lot in [150u64, 200] {
            for (kind, curtailment) in [
                ("single", None),
                ("double", None),
                ("sequential", Some("none")),
                ("sequential", Some("truncated")),
                ("sequential", Some("wedge")),
            ] {
                // Strict double plans need more than half of these lots.
                if kind == "double" && preset == "strict" {
                    continue;
                }
                let mut body = serde_json::json!({ "preset": preset, "lot_size": lot, "kind": kind });
                if let Some(c) = curtailment {
                    body["curtailment"] = c.into();
                }
                out.push(body);
            }
        }
    }
    // Custom risks give plans that decide within a few dozen items.
    for kind in ["single", "double", "sequential"] {
        out.push(serde_json::json!({
            "config": { "p_a": 0.05, "p_r": 0.2, "alpha": 0.05, "beta": 0.1, "ci_half_width": 0.05 },
            "lot_size": 150,
            "kind": kind,
        }));
    }
    out
}

#[derive(Debug, Default)]
pub struct EquivalenceStats {
    pub sequences: usize,
    pub outcomes: u64,
    pub mismatches: Vec<String>,
    pub session_ids: Vec<String>,
}

/// Drives `count` random outcome streams through the HTTP routes and
/// compares every step with the offline decision table, and every final
/// state with [`oracle`] where it applies.
pub async fn run_equivalence(client: &Client, count: usize, seed: u64) -> EquivalenceStats {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let plans = equivalence_plans();
    let mut stats = EquivalenceStats::default();
    let mut created = Vec::new();
    for body in &plans {
        let v = client.create(body.clone()).await;
        let doc: PlanDocument = serde_json::from_value(v["plan"].clone()).unwrap();
        created.push(doc);
    }
    for i in 0..count {
        let doc = created[i % created.len()];
        let v = client.create(serde_json::json!({ "plan": doc })).await;
        let id = v["id"].as_str().unwrap().to_string();
        let table = doc.plan.decision_table().unwrap();
        // Defect rates spread over and beyond the indifference zone.
        let rate: f64 = rng.gen_range(0.0..0.35);
        let horizon = table.horizon() as usize;
        let stream: Vec<bool> = (0..horizon).map(|_| rng.gen_bool(rate)).collect();
        let mut live = Verdict::Continue;
        let mut m = 0usize;
        while !live.is_final() {
            let (status, reply) = client.post_outcome(&id, stream[m]).await;
            if status != StatusCode::OK {
                stats.mismatches.push(format!("{id}: status {status} at m={}", m + 1));
                break;
            }
            m += 1;
            live = verdict_of(&reply);
            let (offline, _, _) = table.run(stream[..m].iter().copied());
            if live != offline {
                stats.mismatches.push(format!("{id}: live {live:?} vs offline {offline:?} at m={m}"));
                break;
            }
        }
        stats.outcomes += m as u64;
        let (offline, used, _) = table.run(stream.iter().copied());
        if (offline, used) != (live, m as u64) {
            stats.mismatches.push(format!("{id}: final live ({live:?}, {m}) vs offline ({offline:?}, {used})"));
        }
        let wedge = matches!(doc.plan, Plan::Sequential(s) if s.curtailment == Curtailment::Wedge);
        if !wedge && oracle(&doc, &stream) != (live, m as u64) {
            stats.mismatches.push(format!("{id}: oracle {:?} vs live ({live:?}, {m})", oracle(&doc, &stream)));
        }
        stats.session_ids.push(id);
        stats.sequences += 1;
    }
    stats
}

/// Every session's full view, keyed by id, as JSON.
pub async fn snapshot_all(client: &Client) -> Vec<(String, Value)> {
    let (_, list) = client.call("GET", "/sessions", None).await;
    let mut out = Vec::new();
    for s in list.as_array().unwrap() {
        let id = s["id"].as_str().unwrap().to_string();
        let (_, detail) = client.call("GET", &format!("/sessions/{id}"), None).await;
        out.push((id, detail));
    }
    out
}
