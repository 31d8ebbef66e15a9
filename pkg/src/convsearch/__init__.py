"""Open-domain conversational search agent.

Core pieces: text featurization, a hierarchical intent classifier
(general classifier + entity-based second level), a stack-based dialogue
state manager, twelve pluggable retrieval components, proactive topic
transitions, append-only dialogue logging, and interaction analytics.
A FastAPI service wraps the engine; the CLI is a thin client.
"""

__version__ = "0.1.0"
