//! Flat JSON form of an instance.
//!
//! ```json
//! {"kind": "laminar", "n": 3, "order": [2, 0, 1],
//!  "sets": [{"members": [0, 1], "cap": 1}]}
//! ```

use serde::{Deserialize, Serialize};

use super::{LaminarSet, MatroidInstance, MatroidKind, ValueOrder};
use crate::error::Error;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct InstanceJson {
    kind: String,
    n: usize,
    order: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sets: Option<Vec<LaminarSet>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    classes: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertices: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<usize>,
}

fn missing(kind: &str, field: &str) -> Error {
    Error::InvalidInput(format!("{kind} instance needs \"{field}\""))
}

impl TryFrom<InstanceJson> for MatroidInstance {
    type Error = Error;

    fn try_from(j: InstanceJson) -> Result<Self, Error> {
        let kind = match j.kind.as_str() {
            "uniform" => MatroidKind::Uniform {
                rank: j.r.ok_or_else(|| missing("uniform", "r"))?,
            },
            "laminar" => MatroidKind::Laminar {
                sets: j.sets.ok_or_else(|| missing("laminar", "sets"))?,
            },
            "rank2" => MatroidKind::Rank2 {
                classes: j.classes.ok_or_else(|| missing("rank2", "classes"))?,
            },
            "graphic" => MatroidKind::Graphic {
                vertices: j.vertices.ok_or_else(|| missing("graphic", "vertices"))?,
                edges: j
                    .edges
                    .ok_or_else(|| missing("graphic", "edges"))?
                    .into_iter()
                    .map(|[u, v]| (u, v))
                    .collect(),
                root: j.root,
            },
            other => return Err(Error::InvalidInput(format!("unknown kind \"{other}\""))),
        };
        MatroidInstance::new(j.n, kind, ValueOrder::new(j.order)?)
    }
}

impl From<MatroidInstance> for InstanceJson {
    fn from(m: MatroidInstance) -> Self {
        let mut j = InstanceJson {
            kind: m.kind.name().to_string(),
            n: m.n,
            order: m.order.ranking().to_vec(),
            r: None,
            sets: None,
            classes: None,
            vertices: None,
            edges: None,
            root: None,
        };
        match m.kind {
            MatroidKind::Uniform { rank } => j.r = Some(rank),
            MatroidKind::Laminar { sets } => j.sets = Some(sets),
            MatroidKind::Rank2 { classes } => j.classes = Some(classes),
            MatroidKind::Graphic {
                vertices,
                edges,
                root,
            } => {
                j.vertices = Some(vertices);
                j.edges = Some(edges.into_iter().map(|(u, v)| [u, v]).collect());
                j.root = root;
            }
        }
        j
    }
}
