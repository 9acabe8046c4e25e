from __future__ import annotations

import pytest

from querygov.catalog import load_catalog
from querygov.cleaning import CleaningPipeline, load_pipeline_config
from querygov.resources import data_path
from querygov.spelling import load_dictionary
from querygov.translation import default_translator


@pytest.fixture(scope="session")
def sample_catalog():
    return load_catalog(data_path("catalog.json"))


@pytest.fixture(scope="session")
def sample_dictionary():
    return load_dictionary(data_path("dictionary.txt"))


@pytest.fixture(scope="session")
def sample_pipeline(sample_catalog, sample_dictionary):
    return CleaningPipeline(
        sample_catalog,
        load_pipeline_config(data_path("pipeline.json")),
        sample_dictionary,
        default_translator(),
    )
