//! Small programs used throughout the tests and the CLI documentation.

use crate::parse::parse_program;
use crate::program::Program;

pub const SMOKING: &str = "\
0.3::lifestyle.
0.3::smokes.
0.6::genetic_risk.
cancer :- smokes, genetic_risk.
";

/// Main supply `a`, backup `b`, system on `c`, report filed `d`.
pub const POWER_FAILURE: &str = "\
0.5::u_a.
0.5::u_b.
a :- u_a.
b :- u_b.
c :- a.
c :- b.
d :- c.
";

/// Genetics, lifestyle, diet and health with one noise fact each:
/// G -> L, G -> D, G -> H, L -> D, L -> H, D -> H.
pub const FIGURE3: &str = "\
0.5::eps_g.
0.4::eps_l.
0.3::eps_d.
0.2::eps_h.
g :- eps_g.
l :- g, eps_l.
d :- g, l.
d :- eps_d.
h :- l, d.
h :- g, eps_h.
";

pub fn smoking() -> Program {
    parse_program(SMOKING).expect("valid example")
}

pub fn power_failure() -> Program {
    parse_program(POWER_FAILURE).expect("valid example")
}

pub fn figure3() -> Program {
    parse_program(FIGURE3).expect("valid example")
}
