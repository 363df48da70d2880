//! Monomial-Cartesian codes over a field tower `F_p ⊆ F_q ⊆ F_{q^t}`, with
//! trace-based repair schemes that recover one or two erased symbols from
//! `F_q`-valued queries to the surviving nodes.

pub mod codes;
pub mod field;
pub mod linalg;
pub mod oracle;
pub mod repair;
pub mod report;
