"""querygov: data-quality governance and guarded natural-language querying for ERP stores.

The package is organised around the query lifecycle:

- ``catalog``    schema whitelist, safety policy, canonical entity tables
- ``cleaning``   four-stage record normalization (translate, spell, canonicalize, validate)
- ``dedupe``     minhash/LSH near-duplicate detection
- ``sync``       incremental source-to-analytics synchronization
- ``retrieval``  validated question/SQL example corpus with vector search
- ``engine``     prompt assembly and guarded SQL generation
- ``guard``      SELECT-only parser, schema/policy validation, parameterization
- ``service``    execution, job lifecycle, audit, metrics, HTTP API
"""

__version__ = "0.1.0"
