"""jcascan: crypto-API invocation scanner and misuse detector for Java
source corpora — structural complexity scoring, stratified sampling,
string-value resolution through evasive transformations, taxonomy
classification, misuse rules, and a 23-case benchmark harness."""

__version__ = "0.1.0"
