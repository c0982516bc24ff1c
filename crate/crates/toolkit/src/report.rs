use dms_core::field::{critical_cells, is_perfect};
use dms_core::homology::betti_mod2;
use dms_core::splitter::SplitResult;
use dms_core::surgery::{BisectionRecord, Composition};
use dms_core::{Complex, VectorField};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BisectionEntry {
    pub old: String,
    pub new: Vec<String>,
    pub pairs: Vec<[String; 2]>,
    pub successor: String,
}

impl From<&BisectionRecord> for BisectionEntry {
    fn from(r: &BisectionRecord) -> Self {
        BisectionEntry {
            old: r.old_cell.to_string(),
            new: r.new_cells.iter().map(|c| c.to_string()).collect(),
            pairs: r.new_pairings.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
            successor: r.successor.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub chi: i64,
    pub betti: Vec<usize>,
    #[serde(rename = "morseCounts")]
    pub morse_counts: Vec<usize>,
    pub perfect: bool,
}

impl Summary {
    pub fn of(k: &Complex, v: &VectorField) -> Summary {
        Summary {
            chi: k.euler_characteristic(),
            betti: betti_mod2(k).b,
            morse_counts: critical_cells(v, k).0.m,
            perfect: is_perfect(k, v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pair<T> {
    pub m1: T,
    pub m2: T,
}

/// Report written next to the output complexes; decompose reports carry one
/// value per summand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Report {
    Compose {
        chi: i64,
        betti: Vec<usize>,
        #[serde(rename = "morseCounts")]
        morse_counts: Vec<usize>,
        perfect: bool,
        bisections: Vec<BisectionEntry>,
        #[serde(rename = "circleLength")]
        circle_length: Option<usize>,
    },
    Decompose {
        chi: Pair<i64>,
        betti: Pair<Vec<usize>>,
        #[serde(rename = "morseCounts")]
        morse_counts: Pair<Vec<usize>>,
        perfect: Pair<bool>,
        bisections: Vec<BisectionEntry>,
        #[serde(rename = "circleLength")]
        circle_length: usize,
    },
}

impl Report {
    pub fn compose(c: &Composition) -> Report {
        let s = Summary::of(&c.complex, &c.field);
        Report::Compose {
            chi: s.chi,
            betti: s.betti,
            morse_counts: s.morse_counts,
            perfect: s.perfect,
            bisections: c.report.bisections.iter().map(BisectionEntry::from).collect(),
            circle_length: None,
        }
    }

    pub fn decompose(d: &SplitResult) -> Report {
        let a = Summary::of(&d.m1.complex, &d.m1.field);
        let b = Summary::of(&d.m2.complex, &d.m2.field);
        Report::Decompose {
            chi: Pair { m1: a.chi, m2: b.chi },
            betti: Pair { m1: a.betti, m2: b.betti },
            morse_counts: Pair { m1: a.morse_counts, m2: b.morse_counts },
            perfect: Pair { m1: a.perfect, m2: b.perfect },
            bisections: d.bisections.iter().map(BisectionEntry::from).collect(),
            circle_length: d.circle.len(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
