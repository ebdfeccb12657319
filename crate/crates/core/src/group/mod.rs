//! Finitely presented groups with a word problem that is decidable at desk
//! scale: a catalog of families with canonical normal forms, plus a shortlex
//! rewriting fallback.

mod normal_form;
mod pingpong;
mod presentation;
mod subgroup;

pub use pingpong::{verify_ping_pong, GroupAction, PingPongCertificate, PingPongFailure, PingPongVerdict};
pub use presentation::{Presentation, RewriteSystem, Strategy};
pub use subgroup::{subgroup_member, Membership, MembershipKind, SubgroupSpec};

use crate::error::GroupError;
use crate::word::Word;

/// Normal form of `w`; see [`Presentation::normal_form`].
pub fn normal_form(p: &Presentation, w: &Word) -> Result<Word, GroupError> {
    p.normal_form(w)
}

/// Normal form of the concatenation `u·v`.
pub fn multiply(p: &Presentation, u: &Word, v: &Word) -> Result<Word, GroupError> {
    p.multiply(u, v)
}
