#[derive(Debug)]
pub struct SolveReport;
