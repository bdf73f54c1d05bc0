//! JSON file formats.
//!
//! A system is `{"states": […], "inputs": […], "trans": {"x|u": ["x'", …]}}`;
//! empty rows are omitted. A bundle groups named systems, relations,
//! controllers, specs and interval covers, and carries a top-level
//! `"format": "symcret/1"` tag. Every map is ordered, so writing a value
//! that was just read reproduces the same bytes.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::relations::{Interface, Relation, RelationKind};
use crate::system::{Controller, FiniteTransitionSystem, Input, InputSet, ReachAvoidSpec, State, StateSet};
use crate::RationalProblem;

pub const FORMAT_TAG: &str = "symcret/1";

fn check_tag(tag: Option<&str>) -> Result<()> {
    match tag {
        None => Ok(()),
        Some(FORMAT_TAG) => Ok(()),
        Some(other) => Err(Error::Format(format!(
            "unsupported format `{other}`, expected `{FORMAT_TAG}`"
        ))),
    }
}

#[derive(Serialize, Deserialize)]
struct SystemDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format: Option<String>,
    states: Vec<State>,
    inputs: Vec<Input>,
    #[serde(default)]
    trans: BTreeMap<String, Vec<State>>,
}

impl SystemDoc {
    fn from_system(sys: &FiniteTransitionSystem, format: Option<String>) -> Self {
        SystemDoc {
            format,
            states: sys.states().iter().cloned().collect(),
            inputs: sys.inputs().iter().cloned().collect(),
            trans: sys
                .transitions()
                .map(|(x, u, succ)| (format!("{x}|{u}"), succ.iter().cloned().collect()))
                .collect(),
        }
    }

    fn into_system(self) -> Result<FiniteTransitionSystem> {
        check_tag(self.format.as_deref())?;
        let mut rows = Vec::new();
        for (key, succ) in self.trans {
            let (x, u) = key
                .split_once('|')
                .ok_or_else(|| Error::Format(format!("transition key `{key}` is not of the form `x|u`")))?;
            rows.push(((State::new(x), Input::new(u)), succ.into_iter().collect::<StateSet>()));
        }
        FiniteTransitionSystem::from_parts(
            self.states.into_iter().collect(),
            self.inputs.into_iter().collect(),
            rows,
        )
    }
}

impl Serialize for FiniteTransitionSystem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SystemDoc::from_system(self, None).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteTransitionSystem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SystemDoc::deserialize(d)?.into_system().map_err(D::Error::custom)
    }
}

/// A standalone system document, tagged with the format version.
pub fn system_to_json(sys: &FiniteTransitionSystem) -> String {
    let doc = SystemDoc::from_system(sys, Some(FORMAT_TAG.to_owned()));
    to_pretty(&doc)
}

pub fn system_from_json(text: &str) -> Result<FiniteTransitionSystem> {
    serde_json::from_str::<SystemDoc>(text)?.into_system()
}

impl Serialize for Controller {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_map(self.iter())
    }
}

impl<'de> Deserialize<'de> for Controller {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let choices = BTreeMap::<State, InputSet>::deserialize(d)?;
        Controller::new(choices).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct InterfaceEntry {
    x1: State,
    x2: State,
    u2: Input,
    u1: InputSet,
}

#[derive(Serialize, Deserialize)]
struct InterfaceDoc {
    kind: RelationKind,
    entries: Vec<InterfaceEntry>,
}

impl Serialize for Interface {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InterfaceDoc {
            kind: self.kind(),
            entries: self
                .entries()
                .map(|((x1, x2, u2), u1)| InterfaceEntry {
                    x1: x1.clone(),
                    x2: x2.clone(),
                    u2: u2.clone(),
                    u1: u1.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interface {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = InterfaceDoc::deserialize(d)?;
        Ok(Interface::from_entries(
            doc.kind,
            doc.entries.into_iter().map(|e| ((e.x1, e.x2, e.u2), e.u1)),
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedRelation {
    pub from: String,
    pub to: String,
    pub relation: Relation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedController {
    pub system: String,
    pub controller: Controller,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedSpec {
    pub system: String,
    pub spec: ReachAvoidSpec,
}

/// Named systems, relations, controllers, specs and covers. All cross
/// references are resolved and validated on load.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bundle {
    pub systems: BTreeMap<String, FiniteTransitionSystem>,
    pub relations: BTreeMap<String, NamedRelation>,
    pub controllers: BTreeMap<String, NamedController>,
    pub specs: BTreeMap<String, NamedSpec>,
    pub covers: BTreeMap<String, RationalProblem>,
}

#[derive(Serialize, Deserialize)]
struct RelationDoc {
    from: String,
    to: String,
    pairs: Vec<(State, State)>,
}

#[derive(Serialize, Deserialize)]
struct ControllerDoc {
    system: String,
    choices: Controller,
}

#[derive(Serialize, Deserialize)]
struct SpecDoc {
    system: String,
    initial: StateSet,
    target: StateSet,
    obstacle: StateSet,
}

#[derive(Serialize, Deserialize)]
struct BundleDoc {
    format: String,
    #[serde(default)]
    systems: BTreeMap<String, FiniteTransitionSystem>,
    #[serde(default)]
    relations: BTreeMap<String, RelationDoc>,
    #[serde(default)]
    controllers: BTreeMap<String, ControllerDoc>,
    #[serde(default)]
    specs: BTreeMap<String, SpecDoc>,
    #[serde(default)]
    covers: BTreeMap<String, RationalProblem>,
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, kind: &'static str, name: &str) -> Result<&'a T> {
    map.get(name).ok_or_else(|| Error::UnknownName {
        kind,
        name: name.to_owned(),
    })
}

impl Bundle {
    pub fn from_json(text: &str) -> Result<Bundle> {
        let doc: BundleDoc = serde_json::from_str(text)?;
        check_tag(Some(&doc.format))?;
        let mut bundle = Bundle {
            systems: doc.systems,
            covers: doc.covers,
            ..Bundle::default()
        };
        for (name, sys) in &bundle.systems {
            if let Some(x) = sys.blocking_states().next() {
                return Err(Error::Format(format!("system `{name}` is blocking at `{x}`")));
            }
        }
        for (name, r) in doc.relations {
            let s1 = bundle.system(&r.from)?;
            let s2 = bundle.system(&r.to)?;
            let relation = Relation::between(s1, s2, r.pairs)?;
            bundle.relations.insert(
                name,
                NamedRelation {
                    from: r.from,
                    to: r.to,
                    relation,
                },
            );
        }
        for (name, c) in doc.controllers {
            c.choices.validate_for(bundle.system(&c.system)?)?;
            bundle.controllers.insert(
                name,
                NamedController {
                    system: c.system,
                    controller: c.choices,
                },
            );
        }
        for (name, s) in doc.specs {
            let spec = ReachAvoidSpec::new(s.initial, s.target, s.obstacle);
            spec.validate_for(bundle.system(&s.system)?)?;
            bundle.specs.insert(name, NamedSpec { system: s.system, spec });
        }
        Ok(bundle)
    }

    pub fn to_json(&self) -> String {
        let doc = BundleDoc {
            format: FORMAT_TAG.to_owned(),
            systems: self.systems.clone(),
            relations: self
                .relations
                .iter()
                .map(|(name, r)| {
                    let pairs = r.relation.pairs().map(|(a, b)| (a.clone(), b.clone())).collect();
                    (
                        name.clone(),
                        RelationDoc {
                            from: r.from.clone(),
                            to: r.to.clone(),
                            pairs,
                        },
                    )
                })
                .collect(),
            controllers: self
                .controllers
                .iter()
                .map(|(name, c)| {
                    (
                        name.clone(),
                        ControllerDoc {
                            system: c.system.clone(),
                            choices: c.controller.clone(),
                        },
                    )
                })
                .collect(),
            specs: self
                .specs
                .iter()
                .map(|(name, s)| {
                    (
                        name.clone(),
                        SpecDoc {
                            system: s.system.clone(),
                            initial: s.spec.initial.clone(),
                            target: s.spec.target.clone(),
                            obstacle: s.spec.obstacle.clone(),
                        },
                    )
                })
                .collect(),
            covers: self.covers.clone(),
        };
        to_pretty(&doc)
    }

    pub fn system(&self, name: &str) -> Result<&FiniteTransitionSystem> {
        lookup(&self.systems, "system", name)
    }

    pub fn relation(&self, name: &str) -> Result<&NamedRelation> {
        lookup(&self.relations, "relation", name)
    }

    pub fn controller(&self, name: &str) -> Result<&NamedController> {
        lookup(&self.controllers, "controller", name)
    }

    pub fn spec(&self, name: &str) -> Result<&NamedSpec> {
        lookup(&self.specs, "spec", name)
    }

    pub fn cover(&self, name: &str) -> Result<&RationalProblem> {
        lookup(&self.covers, "cover", name)
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize + ?Sized>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("documents always serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fig5_bundle_round_trips() {
        let bundle = Bundle::from_json(fixtures::FIG5_JSON).unwrap();
        let once = bundle.to_json();
        let again = Bundle::from_json(&once).unwrap();
        assert_eq!(again, bundle);
        assert_eq!(again.to_json(), once);
    }

    #[test]
    fn system_documents() {
        let fig = fixtures::fig5();
        let text = system_to_json(&fig.s2_prime);
        assert!(text.contains("\"format\": \"symcret/1\""));
        assert!(text.contains("\"a|α\""));
        assert_eq!(system_from_json(&text).unwrap(), fig.s2_prime);
        assert_eq!(system_to_json(&system_from_json(&text).unwrap()), text);
    }

    #[test]
    fn bad_documents_are_rejected() {
        let bad_key = r#"{"states":["x"],"inputs":["u"],"trans":{"xu":["x"]}}"#;
        assert!(matches!(system_from_json(bad_key), Err(Error::Format(_))));
        let bad_tag = r#"{"format":"other/2","states":[],"inputs":[]}"#;
        assert!(matches!(system_from_json(bad_tag), Err(Error::Format(_))));
        let unknown = r#"{"states":["x"],"inputs":["u"],"trans":{"x|u":["y"]}}"#;
        assert!(matches!(system_from_json(unknown), Err(Error::UnknownState(_))));
        let dangling = r#"{"format":"symcret/1","relations":{"R":{"from":"A","to":"B","pairs":[]}}}"#;
        assert!(matches!(Bundle::from_json(dangling), Err(Error::UnknownName { .. })));
        let blocking = r#"{"format":"symcret/1","systems":{"A":{"states":["x"],"inputs":["u"]}}}"#;
        assert!(matches!(Bundle::from_json(blocking), Err(Error::Format(_))));
        let empty_choice =
            r#"{"format":"symcret/1","systems":{"A":{"states":["x"],"inputs":["u"],"trans":{"x|u":["x"]}}},
                "controllers":{"C":{"system":"A","choices":{"x":[]}}}}"#;
        assert!(Bundle::from_json(empty_choice).is_err());
    }

    #[test]
    fn interface_round_trips() {
        let fig = fixtures::fig5();
        let i = crate::relations::maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Asr).unwrap();
        let text = serde_json::to_string(&i).unwrap();
        let back: Interface = serde_json::from_str(&text).unwrap();
        assert_eq!(back, i);
    }
}
