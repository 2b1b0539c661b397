//! Random generation, matrix files, reports and property campaigns used by
//! the command-line tool and the test suites.

pub mod campaign;
pub mod gen;
pub mod io;
pub mod report;
