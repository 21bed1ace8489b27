//! The shipped minimal relations for n = 2 and n = 3, in the expression grammar.

pub const APPENDIX_N2: &str = include_str!("../data/appendix_n2.txt");
pub const APPENDIX_N3: &str = include_str!("../data/appendix_n3.txt");
