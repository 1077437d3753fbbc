"""iropskit: exploratory analysis toolkit for airline irregular operations.

Modules
-------
flight_data       record schema, taxonomy, CSV ingestion, disruption reports
synth             seeded synthetic schedule generator with known ground truth
feature_pipeline  geodesy, periodic encodings, one-hot, standard/range/power scaling
dimred            PCA and exact t-SNE (compiled kernel with numpy fallback)
featsel           KSG mutual information and ARD Matern-3/2 GP regression
cli               reproducible pipeline with manifests (``iropskit`` command)
"""

__version__ = "0.1.0"
