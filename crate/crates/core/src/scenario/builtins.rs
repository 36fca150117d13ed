use super::{parse_scenario, Scenario};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Builtin {
    pub name: &'static str,
    pub description: &'static str,
    text: &'static str,
}

const BUILTINS: &[Builtin] = &[
    Builtin {
        name: "standard_box",
        description: "standard contact structure, Legendrian curves and horizontal curves in B_r",
        text: include_str!("builtins/standard_box.toml"),
    },
    Builtin {
        name: "ball_extremal",
        description: "Cayley pullback, parabolic invariance and automorphisms fixing (1,0)",
        text: include_str!("builtins/ball_extremal.toml"),
    },
    Builtin {
        name: "punctured_family",
        description: "lifts dy - (z - c/w) dw for c in {0, 1, i}: classes, monodromy, fitness, atlas",
        text: include_str!("builtins/punctured_family.toml"),
    },
    Builtin {
        name: "lift_metric_equality",
        description: "Legendrian-disc metric equals the base metric; distance sandwich",
        text: include_str!("builtins/lift_metric_equality.toml"),
    },
    Builtin {
        name: "pullback_demo",
        description: "pullbacks of a lift along a shear, the identity and degenerate maps",
        text: include_str!("builtins/pullback_demo.toml"),
    },
];

pub fn list_builtins() -> &'static [Builtin] {
    BUILTINS
}

pub fn builtin_text(name: &str) -> Result<&'static str> {
    BUILTINS
        .iter()
        .find(|b| b.name == name)
        .map(|b| b.text)
        .ok_or_else(|| Error::UnknownName(name.into()))
}

pub fn builtin(name: &str) -> Result<Scenario> {
    parse_scenario(builtin_text(name)?)
}
