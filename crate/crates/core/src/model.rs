//! Instance model: weighted items inserted into and deleted from a dynamic
//! set over discrete steps. Queue flavors keep the items in a list where
//! only prefixes may be deleted; FIFO queues additionally restrict
//! insertions to the tail, decremental flavors front-load all insertions
//! into the first step.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    DynamicSet,
    DecrementalSet,
    DynamicQueue,
    FifoQueue,
    DecrementalQueue,
}

impl Flavor {
    pub fn is_queue(self) -> bool {
        matches!(
            self,
            Flavor::DynamicQueue | Flavor::FifoQueue | Flavor::DecrementalQueue
        )
    }

    pub fn is_decremental(self) -> bool {
        matches!(self, Flavor::DecrementalSet | Flavor::DecrementalQueue)
    }

    pub fn name(self) -> &'static str {
        match self {
            Flavor::DynamicSet => "dynamic_set",
            Flavor::DecrementalSet => "decremental_set",
            Flavor::DynamicQueue => "dynamic_queue",
            Flavor::FifoQueue => "fifo_queue",
            Flavor::DecrementalQueue => "decremental_queue",
        }
    }

    pub fn parse(s: &str) -> Result<Flavor> {
        match s {
            "dynamic_set" => Ok(Flavor::DynamicSet),
            "decremental_set" => Ok(Flavor::DecrementalSet),
            "dynamic_queue" => Ok(Flavor::DynamicQueue),
            "fifo_queue" => Ok(Flavor::FifoQueue),
            "decremental_queue" => Ok(Flavor::DecrementalQueue),
            other => Err(Error::UnknownName(format!("flavor {other:?}"))),
        }
    }
}

/// Index into an instance's item catalog (order of first insertion).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct ItemIx(pub u32);

impl ItemIx {
    pub fn i(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug)]
pub struct ItemMeta {
    pub label: String,
    pub weight: f64,
    /// Rank of `label` in lexicographic order over the catalog; ties on
    /// weight are broken by this rank so "heaviest" is always unique.
    pub tie_rank: u64,
}

/// Insertion position: at the queue front or directly after another item.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Anchor {
    Front,
    After(ItemIx),
}

/// Events revealed in one step's pre-phase. Inserts apply before deletes,
/// and both apply before any collection in the step.
#[derive(Clone, Debug, Default)]
pub struct StepOps {
    pub inserts: Vec<(ItemIx, Anchor)>,
    pub deletes: Vec<ItemIx>,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub flavor: Flavor,
    pub items: Vec<ItemMeta>,
    pub steps: Vec<StepOps>,
}

/// Structural predicates over the whole event sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FlavorReport {
    pub is_decremental: bool,
    pub prefix_deletes_only: bool,
    pub fifo_insertions: bool,
    pub nondecreasing_weights: bool,
}

impl Instance {
    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn weight(&self, ix: ItemIx) -> f64 {
        self.items[ix.i()].weight
    }

    pub fn label(&self, ix: ItemIx) -> &str {
        &self.items[ix.i()].label
    }

    pub fn ix_of(&self, label: &str) -> Option<ItemIx> {
        self.items
            .iter()
            .position(|m| m.label == label)
            .map(|i| ItemIx(i as u32))
    }

    /// Validates the event sequence against the declared flavor and reports
    /// the structural flags. Construction through [`InstanceBuilder`] or
    /// [`Instance::from_json`] already ran this; it is re-runnable because
    /// the fields are public.
    pub fn validate(&self) -> Result<FlavorReport> {
        for m in &self.items {
            if !m.weight.is_finite() || m.weight < 0.0 {
                return Err(Error::MalformedInstance(format!(
                    "item {:?} has weight {}",
                    m.label, m.weight
                )));
            }
        }
        let n = self.items.len();
        let mut inserted = vec![false; n];
        let mut active = vec![false; n];
        let mut order: Vec<ItemIx> = Vec::with_capacity(n);

        let mut report = FlavorReport {
            is_decremental: true,
            prefix_deletes_only: true,
            fifo_insertions: true,
            nondecreasing_weights: true,
        };

        let check_monotone = |order: &[ItemIx], flag: &mut bool| {
            for w in order.windows(2) {
                if self.weight(w[0]) > self.weight(w[1]) {
                    *flag = false;
                }
            }
        };

        for (t, step) in self.steps.iter().enumerate() {
            for &(ix, anchor) in &step.inserts {
                if ix.i() >= n {
                    return Err(Error::MalformedInstance(format!(
                        "insert of out-of-catalog index {ix:?}"
                    )));
                }
                if inserted[ix.i()] {
                    return Err(Error::MalformedInstance(format!(
                        "duplicate id {:?}",
                        self.label(ix)
                    )));
                }
                if t > 0 {
                    report.is_decremental = false;
                    if self.flavor.is_decremental() {
                        return Err(Error::MalformedInstance(format!(
                            "decremental flavor but {:?} inserted at step {}",
                            self.label(ix),
                            t + 1
                        )));
                    }
                }
                let pos = match anchor {
                    Anchor::Front => 0,
                    Anchor::After(a) => {
                        if a.i() >= n || !active[a.i()] {
                            return Err(Error::MalformedInstance(format!(
                                "insert of {:?} anchored to inactive item",
                                self.label(ix)
                            )));
                        }
                        order.iter().position(|&o| o == a).expect("anchor active") + 1
                    }
                };
                if pos != order.len() {
                    report.fifo_insertions = false;
                    if self.flavor == Flavor::FifoQueue {
                        return Err(Error::MalformedInstance(format!(
                            "fifo_queue insert of {:?} not at the tail",
                            self.label(ix)
                        )));
                    }
                }
                order.insert(pos, ix);
                inserted[ix.i()] = true;
                active[ix.i()] = true;
                check_monotone(&order, &mut report.nondecreasing_weights);
            }
            for (k, &ix) in step.deletes.iter().enumerate() {
                if ix.i() >= n || !inserted[ix.i()] {
                    return Err(Error::MalformedInstance(format!(
                        "delete of unknown id at step {}",
                        t + 1
                    )));
                }
                if !active[ix.i()] || step.deletes[..k].contains(&ix) {
                    return Err(Error::MalformedInstance(format!(
                        "repeated delete of id {:?} at step {}",
                        self.label(ix),
                        t + 1
                    )));
                }
            }
            // A step's delete set must be a prefix of the current order for
            // queue flavors; for sets it is merely reported.
            if !step.deletes.is_empty() {
                let k = step.deletes.len();
                let is_prefix = k <= order.len()
                    && order[..k]
                        .iter()
                        .all(|o| step.deletes.contains(o));
                if !is_prefix {
                    report.prefix_deletes_only = false;
                    if self.flavor.is_queue() {
                        return Err(Error::MalformedInstance(format!(
                            "non-prefix queue deletion at step {}",
                            t + 1
                        )));
                    }
                }
            }
            for &ix in &step.deletes {
                active[ix.i()] = false;
            }
            order.retain(|&o| active[o.i()]);
            check_monotone(&order, &mut report.nondecreasing_weights);
        }
        Ok(report)
    }

    pub fn to_json(&self) -> String {
        let doc = InstanceDoc {
            flavor: self.flavor,
            steps: self
                .steps
                .iter()
                .map(|s| StepDoc {
                    insert: s
                        .inserts
                        .iter()
                        .map(|&(ix, anchor)| InsertDoc {
                            id: self.label(ix).to_string(),
                            weight: self.weight(ix),
                            after: match anchor {
                                Anchor::Front => None,
                                Anchor::After(a) => Some(self.label(a).to_string()),
                            },
                        })
                        .collect(),
                    delete: s.deletes.iter().map(|&ix| self.label(ix).to_string()).collect(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("instance serializes")
    }

    pub fn from_json(s: &str) -> Result<Instance> {
        let doc: InstanceDoc = serde_json::from_str(s)
            .map_err(|e| Error::MalformedInstance(format!("json: {e}")))?;
        let mut b = InstanceBuilder::new(doc.flavor);
        for step in &doc.steps {
            b.step();
            for ins in &step.insert {
                b.insert(&ins.id, ins.weight, ins.after.as_deref());
            }
            for id in &step.delete {
                b.delete(id);
            }
        }
        b.build()
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    flavor: Flavor,
    steps: Vec<StepDoc>,
}

#[derive(Serialize, Deserialize)]
struct StepDoc {
    #[serde(default)]
    insert: Vec<InsertDoc>,
    #[serde(default)]
    delete: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct InsertDoc {
    id: String,
    weight: f64,
    #[serde(default)]
    after: Option<String>,
}

/// Incremental instance construction; `build` validates the result.
pub struct InstanceBuilder {
    flavor: Flavor,
    by_label: HashMap<String, ItemIx>,
    steps: Vec<(Vec<(String, f64, Option<String>)>, Vec<String>)>,
}

impl InstanceBuilder {
    pub fn new(flavor: Flavor) -> Self {
        InstanceBuilder {
            flavor,
            by_label: HashMap::new(),
            steps: Vec::new(),
        }
    }

    /// Starts a new step; events accumulate into the latest step.
    pub fn step(&mut self) -> &mut Self {
        self.steps.push((Vec::new(), Vec::new()));
        self
    }

    /// Inserts `label` in the current step, after item `after` (None = front).
    pub fn insert(&mut self, label: &str, weight: f64, after: Option<&str>) -> &mut Self {
        if self.steps.is_empty() {
            self.steps.push((Vec::new(), Vec::new()));
        }
        self.steps
            .last_mut()
            .unwrap()
            .0
            .push((label.to_string(), weight, after.map(str::to_string)));
        self
    }

    pub fn delete(&mut self, label: &str) -> &mut Self {
        if self.steps.is_empty() {
            self.steps.push((Vec::new(), Vec::new()));
        }
        self.steps.last_mut().unwrap().1.push(label.to_string());
        self
    }

    pub fn build(mut self) -> Result<Instance> {
        let mut items: Vec<ItemMeta> = Vec::new();
        let mut steps: Vec<StepOps> = Vec::new();
        for (inserts, deletes) in std::mem::take(&mut self.steps) {
            let mut ops = StepOps::default();
            for (label, weight, after) in inserts {
                if self.by_label.contains_key(&label) {
                    return Err(Error::MalformedInstance(format!("duplicate id {label:?}")));
                }
                let ix = ItemIx(items.len() as u32);
                self.by_label.insert(label.clone(), ix);
                items.push(ItemMeta {
                    label,
                    weight,
                    tie_rank: 0,
                });
                let anchor = match after {
                    None => Anchor::Front,
                    Some(a) => Anchor::After(
                        *self
                            .by_label
                            .get(&a)
                            .ok_or_else(|| Error::MalformedInstance(format!("unknown anchor {a:?}")))?,
                    ),
                };
                ops.inserts.push((ix, anchor));
            }
            for label in deletes {
                let ix = *self
                    .by_label
                    .get(&label)
                    .ok_or_else(|| Error::MalformedInstance(format!("delete of unknown id {label:?}")))?;
                ops.deletes.push(ix);
            }
            steps.push(ops);
        }
        // Tie ranks follow lexicographic label order.
        let mut by_label: Vec<usize> = (0..items.len()).collect();
        by_label.sort_by(|&a, &b| items[a].label.cmp(&items[b].label));
        for (rank, &i) in by_label.iter().enumerate() {
            items[i].tie_rank = rank as u64;
        }
        let instance = Instance {
            flavor: self.flavor,
            items,
            steps,
        };
        instance.validate()?;
        Ok(instance)
    }
}

/// Per-step item selections; `None` is PASS and contributes zero gain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub picks: Vec<Option<ItemIx>>,
}

impl Schedule {
    pub fn empty(num_steps: usize) -> Schedule {
        Schedule {
            picks: vec![None; num_steps],
        }
    }

    pub fn to_json(&self, instance: &Instance) -> String {
        let doc = ScheduleDoc {
            picks: self
                .picks
                .iter()
                .map(|p| p.map(|ix| instance.label(ix).to_string()))
                .collect(),
        };
        serde_json::to_string(&doc).expect("schedule serializes")
    }

    pub fn from_json(s: &str, instance: &Instance) -> Result<Schedule> {
        let doc: ScheduleDoc =
            serde_json::from_str(s).map_err(|e| Error::MalformedInstance(format!("json: {e}")))?;
        let mut picks = Vec::with_capacity(doc.picks.len());
        for p in doc.picks {
            picks.push(match p {
                None => None,
                Some(label) => Some(instance.ix_of(&label).ok_or_else(|| {
                    Error::MalformedInstance(format!("schedule references unknown id {label:?}"))
                })?),
            });
        }
        Ok(Schedule { picks })
    }
}

#[derive(Serialize, Deserialize)]
struct ScheduleDoc {
    picks: Vec<Option<String>>,
}

/// Free-function form of [`Instance::validate`].
pub fn validate_instance(instance: &Instance) -> Result<FlavorReport> {
    instance.validate()
}
