use std::collections::BTreeMap;

use serde::Serialize;

use super::success::{eval_outcomes, EvalSetup};
use super::testset::TestSet;
use crate::embed::{distance, Embedding};
use crate::envgrid::Event;
use crate::error::Result;
use crate::instructor::Instruction;
use crate::orchestrator::QFunction;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QDistancePoint {
    pub event: Event,
    pub synonym_index: usize,
    pub distance: f64,
    pub mean_max_q: f64,
    pub occurrences: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QDistanceReport {
    pub points: Vec<QDistancePoint>,
    /// Least-squares slope of `mean_max_q` on `distance`; `None` when the
    /// distances do not vary.
    pub trend_slope: Option<f64>,
}

impl QDistanceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("event,synonym_index,distance,mean_max_q,occurrences\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                p.event, p.synonym_index, p.distance, p.mean_max_q, p.occurrences
            ));
        }
        match self.trend_slope {
            Some(s) => out.push_str(&format!("# trend_slope,{s}\n")),
            None => out.push_str("# trend_slope,\n"),
        }
        out
    }
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn ols_slope(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

struct EventEmbeddings {
    root: Embedding,
    synonyms: Vec<Embedding>,
}

fn embed_event(setup: &EvalSetup<'_>, event: Event) -> Result<EventEmbeddings> {
    let set = setup.db.get(event)?;
    let embed = |text: &str, synonym_index: usize| {
        setup.embedder.embed(&Instruction {
            text: text.to_owned(),
            event,
            synonym_index,
        })
    };
    Ok(EventEmbeddings {
        root: embed(&set.root, 0)?,
        synonyms: set.iter().enumerate().map(|(j, s)| embed(s, j)).collect::<Result<_>>()?,
    })
}

/// Evaluates `q` greedily on the test set; wherever a goal is completed,
/// scores the completing state under every synonym of that goal and
/// averages the maximum Q-value per synonym.
pub fn q_distance_analysis(q: &dyn QFunction, testset: &TestSet, setup: &EvalSetup<'_>) -> Result<QDistanceReport> {
    let outcomes = eval_outcomes(q, testset, setup)?;
    let mut cache: BTreeMap<Event, EventEmbeddings> = BTreeMap::new();
    let mut sums: BTreeMap<(Event, usize), (f64, usize)> = BTreeMap::new();
    for (_, outcome) in &outcomes {
        for (goal, frames) in outcome.goals.iter().zip(&outcome.reach_frames) {
            let Some(frames) = frames else { continue };
            if !cache.contains_key(goal) {
                cache.insert(*goal, embed_event(setup, *goal)?);
            }
            for (j, emb) in cache[goal].synonyms.iter().enumerate() {
                let qs = q.q_values(frames, emb.as_slice())?;
                let max = qs.iter().fold(f32::NEG_INFINITY, |m, &v| m.max(v)) as f64;
                let slot = sums.entry((*goal, j)).or_insert((0.0, 0));
                slot.0 += max;
                slot.1 += 1;
            }
        }
    }
    let points: Vec<QDistancePoint> = sums
        .into_iter()
        .map(|((event, j), (sum, n))| {
            let e = &cache[&event];
            QDistancePoint {
                event,
                synonym_index: j,
                distance: distance(&e.synonyms[j], &e.root),
                mean_max_q: sum / n as f64,
                occurrences: n,
            }
        })
        .collect();
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.distance, p.mean_max_q)).collect();
    Ok(QDistanceReport {
        trend_slope: ols_slope(&xy),
        points,
    })
}
