"""Sentiment lexicon transfer through aligned word embeddings."""
