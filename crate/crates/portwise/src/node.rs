//! Circuit positions: input/output nodes and gate ports.
//!
//! A value originates at a *producer* (an input node or a gate output port)
//! and is needed at a *consumer* (an output node or a gate input port). The
//! two classifications are total and disjoint.
//!
//! Two textual encodings exist and must not be confused:
//!
//! * the wire-reference grammar used by circuit documents and builders
//!   (`in:w`, `out:w`, `gate.label:in`, `gate.label:out`), implemented by
//!   [`Display`](std::fmt::Display) / [`FromStr`](std::str::FromStr);
//! * the port-label encoding used to name the factors of a state over a
//!   stage's exits (`in:w` for input nodes, `out:gate:label` for output
//!   ports), implemented by [`NodeRef::port_label`].
//!
//! Gate names may not contain `.` or `:`, which keeps both encodings
//! injective while leaving wire labels unrestricted.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::label::{Label, LabelError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GateIdError {
    #[error("gate names must be nonempty")]
    Empty,
    #[error("gate name {0:?} contains a reserved character ('.' or ':')")]
    ReservedCharacter(String),
}

/// Name of a gate. Gate names form their own namespace: a gate may share its
/// name with a wire label without ambiguity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GateId(String);

impl GateId {
    pub fn new(name: impl Into<String>) -> Result<Self, GateIdError> {
        let name = name.into();
        if name.is_empty() {
            return Err(GateIdError::Empty);
        }
        if name.contains('.') || name.contains(':') {
            return Err(GateIdError::ReservedCharacter(name));
        }
        Ok(GateId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NodeRefParseError {
    #[error("empty node reference")]
    Empty,
    #[error("node reference {0:?} matches no known form (in:w, out:w, gate.label:in, gate.label:out)")]
    UnknownForm(String),
    #[error("node reference {0:?} has an invalid label: {1}")]
    BadLabel(String, LabelError),
    #[error("node reference {0:?} has an invalid gate name: {1}")]
    BadGate(String, GateIdError),
}

/// A position in a circuit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeRef {
    /// A circuit input; a producer.
    InputNode(Label),
    /// A circuit output; a consumer.
    OutputNode(Label),
    /// Input port `(gate, in, label)`; a consumer.
    InputPort(GateId, Label),
    /// Output port `(gate, out, label)`; a producer.
    OutputPort(GateId, Label),
}

impl NodeRef {
    pub fn is_producer(&self) -> bool {
        matches!(self, NodeRef::InputNode(_) | NodeRef::OutputPort(..))
    }

    pub fn is_consumer(&self) -> bool {
        !self.is_producer()
    }

    pub fn gate(&self) -> Option<&GateId> {
        match self {
            NodeRef::InputPort(g, _) | NodeRef::OutputPort(g, _) => Some(g),
            _ => None,
        }
    }

    pub fn label(&self) -> &Label {
        match self {
            NodeRef::InputNode(l)
            | NodeRef::OutputNode(l)
            | NodeRef::InputPort(_, l)
            | NodeRef::OutputPort(_, l) => l,
        }
    }

    /// The state-factor label contributed by a producer: `in:w` for an input
    /// node, `out:gate:label` for an output port. `None` for consumers.
    ///
    /// The encoding is injective, and since every producer of one kind shares
    /// the prefix, it preserves the relative canonical order of input nodes.
    pub fn port_label(&self) -> Option<Label> {
        let text = match self {
            NodeRef::InputNode(w) => format!("in:{w}"),
            NodeRef::OutputPort(g, m) => format!("out:{g}:{m}"),
            _ => return None,
        };
        Some(Label::new(text).expect("port labels are nonempty"))
    }

    /// Inverse of [`NodeRef::port_label`] on well-formed strings.
    pub fn parse_port_label(text: &str) -> Option<NodeRef> {
        if let Some(rest) = text.strip_prefix("in:") {
            return Some(NodeRef::InputNode(Label::new(rest).ok()?));
        }
        if let Some(rest) = text.strip_prefix("out:") {
            let (gate, label) = rest.split_once(':')?;
            return Some(NodeRef::OutputPort(
                GateId::new(gate).ok()?,
                Label::new(label).ok()?,
            ));
        }
        None
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeRef::InputNode(w) => write!(f, "in:{w}"),
            NodeRef::OutputNode(w) => write!(f, "out:{w}"),
            NodeRef::InputPort(g, l) => write!(f, "{g}.{l}:in"),
            NodeRef::OutputPort(g, l) => write!(f, "{g}.{l}:out"),
        }
    }
}

impl FromStr for NodeRef {
    type Err = NodeRefParseError;

    fn from_str(s: &str) -> Result<Self, NodeRefParseError> {
        if s.is_empty() {
            return Err(NodeRefParseError::Empty);
        }
        let bad_label = |e| NodeRefParseError::BadLabel(s.to_owned(), e);
        let bad_gate = |e| NodeRefParseError::BadGate(s.to_owned(), e);
        if let Some(rest) = s.strip_prefix("in:") {
            return Ok(NodeRef::InputNode(Label::new(rest).map_err(bad_label)?));
        }
        if let Some(rest) = s.strip_prefix("out:") {
            return Ok(NodeRef::OutputNode(Label::new(rest).map_err(bad_label)?));
        }
        let (body, make): (&str, fn(GateId, Label) -> NodeRef) =
            if let Some(body) = s.strip_suffix(":in") {
                (body, NodeRef::InputPort)
            } else if let Some(body) = s.strip_suffix(":out") {
                (body, NodeRef::OutputPort)
            } else {
                return Err(NodeRefParseError::UnknownForm(s.to_owned()));
            };
        // gate names contain no '.', so the first '.' separates gate from label
        let Some((gate, label)) = body.split_once('.') else {
            return Err(NodeRefParseError::UnknownForm(s.to_owned()));
        };
        Ok(make(
            GateId::new(gate).map_err(bad_gate)?,
            Label::new(label).map_err(bad_label)?,
        ))
    }
}
