"""Min-entropy estimation for random-number sources.

Core layers:

* :mod:`minent.entropy` -- exact entropy/power-sum math and sharp bounds;
* :mod:`minent.tuples` -- suffix-array tuple statistics;
* :mod:`minent.estimators` -- the NIST SP 800-90B LRS estimator and the
  bias-corrected / order-alpha variants;
* :mod:`minent.sources` -- seeded simulated sources;
* :mod:`minent.analysis` -- Monte-Carlo bias/variance experiments;
* :mod:`minent.seqio` -- sequence file formats;
* :mod:`minent.service` / :mod:`minent.cli` -- HTTP service and its CLI client.
"""

__version__ = "0.1.0"
