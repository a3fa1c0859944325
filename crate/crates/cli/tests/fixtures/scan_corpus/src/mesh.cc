// neighbor exchange
void exchange(MPI_Comm grid) {
    MPI_Scatter(rows, n, MPI_FLOAT, local, n, MPI_FLOAT, 0, grid);
    MPI_Gather(local, n, MPI_FLOAT, rows, n, MPI_FLOAT, 0, grid);
    MPI_Barrier(grid); MPI_Barrier(grid);
}
